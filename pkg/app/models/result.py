import enum
from typing import Dict, Optional

from pydantic import Field

from app.config import settings
from app.models.base import FrozenModel
from app.models.certificate import Certificate
from app.models.design import AutocorrSequence, ConstraintReport, WeightSolution
from app.models.factor import FactorizationReport, FactorMethod, ZeroSet
from app.models.filter import FirFilter


class WeightMethod(str, enum.Enum):
    BISECTION = "bisection"
    SECANT = "secant"


class DesignOptions(FrozenModel):
    """Numerical knobs of the design pipeline; defaults come from settings."""

    grid_density: int = Field(default_factory=lambda: settings.GRID_DENSITY, ge=4)
    weight_tol: float = Field(default_factory=lambda: settings.WEIGHT_TOL, gt=0)
    weight_max_iter: int = Field(default_factory=lambda: settings.WEIGHT_MAX_ITER, ge=1)
    weight_method: WeightMethod = Field(default_factory=lambda: WeightMethod(settings.WEIGHT_METHOD))
    factorization: FactorMethod = FactorMethod.AUTO
    root_order_limit: int = Field(default_factory=lambda: settings.ROOT_ORDER_LIMIT, ge=1)
    cepstral_fft_len: Optional[int] = None
    psd_eps: float = Field(default_factory=lambda: settings.PSD_EPS, ge=0)
    constraint_tol: float = Field(default_factory=lambda: settings.CONSTRAINT_TOL, gt=0)
    alternation_rtol: float = Field(default_factory=lambda: settings.ALTERNATION_RTOL, gt=0)
    ratio_tol: float = Field(default_factory=lambda: settings.RATIO_TOL, gt=0)


class DesignResult(FrozenModel):
    filter: FirFilter
    autocorr: AutocorrSequence
    weight: WeightSolution
    constraints: ConstraintReport
    factorization: FactorizationReport
    certificate: Certificate
    method: FactorMethod
    zero_set: Optional[ZeroSet] = None
    timings: Dict[str, float] = Field(default_factory=dict)
