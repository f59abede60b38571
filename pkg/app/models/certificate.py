import enum
from typing import Tuple

from app.models.base import FrozenModel


class CertificateSource(str, enum.Enum):
    FILTER = "filter"
    AUTOCORRELATION = "autocorrelation"


class DeviationReport(FrozenModel):
    """Deviations of |H| against the design bands.

    ``delta_p`` is the peak of the weighted error over every band and
    ``delta_s`` is delta_p / k_des. The raw band peaks are kept alongside
    for the practical ratio check.
    """

    delta_p: float              # max over all bands of |W (|H| - D)|
    delta_s: float              # delta_p / k_des
    arg_max_freq: float         # where the weighted error peaks, units of pi
    passband_deviation: float   # max over passbands of | |H| - 1 |
    stopband_peak: float        # max over stopbands of |H|
    passband_peak: float        # max over passbands of |H| - 1
    passband_trough: float      # max over passbands of 1 - |H|
    passband_peak_freq: float   # units of pi
    stopband_peak_freq: float   # units of pi

    @property
    def ratio(self) -> float:
        """Measured passband deviation over measured stopband peak."""
        if self.stopband_peak == 0:
            return float("inf")
        return self.passband_deviation / self.stopband_peak


class AdjustedTargets(FrozenModel):
    """Stopband target and weight of the adjusted error E'."""

    d_prime_stop: float  # delta_s / 2
    w_prime_stop: float  # 2 k_des
    level: float         # delta_p, the nominal level of |E'|


class Certificate(FrozenModel):
    alternations_found: int
    alternations_required: int
    alternation_freqs: Tuple[float, ...]  # units of pi
    deviations: DeviationReport
    targets: AdjustedTargets
    ratio_ok: bool
    source: CertificateSource = CertificateSource.FILTER

    @property
    def optimal(self) -> bool:
        return self.alternations_found >= self.alternations_required
