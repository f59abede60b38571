import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


class Settings:
    def __init__(self):
        # Application Settings
        self.PROJECT_NAME = os.getenv("PROJECT_NAME", "Minimax FIR Design Service")
        self.API_V1_PREFIX = os.getenv("API_V1_PREFIX", "/api/v1")
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

        # Frequency grids (points per basis function / degree of freedom)
        self.GRID_DENSITY = _int("GRID_DENSITY", "16")
        self.VALIDATION_DENSITY = _int("VALIDATION_DENSITY", "64")
        self.CERTIFY_DENSITY = _int("CERTIFY_DENSITY", "32")

        # Exchange algorithm
        self.REMEZ_MAX_ITER = _int("REMEZ_MAX_ITER", "100")
        self.REMEZ_DELTA_RTOL = _float("REMEZ_DELTA_RTOL", "1e-12")
        self.REMEZ_SPREAD_TOL = _float("REMEZ_SPREAD_TOL", "1e-8")

        # Weight search
        self.WEIGHT_TOL = _float("WEIGHT_TOL", "1e-8")
        self.WEIGHT_MAX_ITER = _int("WEIGHT_MAX_ITER", "60")
        self.WEIGHT_METHOD = os.getenv("WEIGHT_METHOD", "bisection")
        self.WEIGHT_UPPER_CAP = _float("WEIGHT_UPPER_CAP", "1e12")

        # Autocorrelation lift
        self.PSD_EPS = _float("PSD_EPS", "1e-9")
        self.CONSTRAINT_TOL = _float("CONSTRAINT_TOL", "1e-4")

        # Spectral factorization
        self.ROOT_ORDER_LIMIT = _int("ROOT_ORDER_LIMIT", "128")
        self.PAIRING_TOL = _float("PAIRING_TOL", "1e-7")
        self.ON_CIRCLE_TOL = _float("ON_CIRCLE_TOL", "1e-4")
        self.CEPSTRAL_OVERSAMPLING = _int("CEPSTRAL_OVERSAMPLING", "64")
        self.CEPSTRAL_MAX_RETRIES = _int("CEPSTRAL_MAX_RETRIES", "2")
        self.CEPSTRAL_RESIDUAL_TOL = _float("CEPSTRAL_RESIDUAL_TOL", "1e-6")
        # relative lift of P for retries, and the smallest FFT used with it
        self.CEPSTRAL_REGULARIZATION = _float("CEPSTRAL_REGULARIZATION", "1e-8")
        self.CEPSTRAL_REGULARIZED_FFT = _int("CEPSTRAL_REGULARIZED_FFT", "262144")

        # Certificate
        self.ALTERNATION_RTOL = _float("ALTERNATION_RTOL", "1e-4")
        self.RATIO_TOL = _float("RATIO_TOL", "1e-3")

        # Response export
        self.GROUP_DELAY_FLOOR = _float("GROUP_DELAY_FLOOR", "1e-8")

# Create settings instance
settings = Settings()
