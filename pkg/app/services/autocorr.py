import logging
import math
from typing import Optional, Tuple

import numpy as np

from app.config import settings
from app.errors import InvalidInputError, NegativeSpectrumError
from app.models.design import AutocorrSequence, BasisKind, ConstraintReport, ZeroPhaseDesign
from app.models.filter import CoeffDomain, DesignSpec
from app.services.chebyshev import build_grid
from app.services.spectrum import dense_grid, local_extrema, polish_extrema, zero_phase_value

logger = logging.getLogger(__name__)


def _power(p: AutocorrSequence):
    def evaluate(omegas):
        return zero_phase_value(p.one_sided, p.domain, omegas)
    return evaluate


def minimum_power(p: AutocorrSequence, density: Optional[int] = None) -> Tuple[float, float]:
    """Smallest value of P over the whole frequency axis and where it occurs (radians)."""
    density = settings.VALIDATION_DENSITY if density is None else density
    basis_size = 2 * p.order + 1 if p.domain == CoeffDomain.COMPLEX else p.order + 1
    omegas = dense_grid(p.domain, density * basis_size)
    power = _power(p)
    values = power(omegas)
    _, minima = local_extrema(values, np.zeros(omegas.size, dtype=int))
    w, v = polish_extrema(power, omegas, minima, maximize=False)
    all_w = np.concatenate([omegas, w])
    all_v = np.concatenate([values, v])
    i = int(np.argmin(all_v))
    return float(all_v[i]), float(all_w[i])


def lift_to_autocorrelation(design: ZeroPhaseDesign, a: float, b: float, *,
                            psd_eps: Optional[float] = None,
                            density: Optional[int] = None) -> AutocorrSequence:
    """p = a g + b delta; the result must be a nonnegative spectrum."""
    psd_eps = settings.PSD_EPS if psd_eps is None else psd_eps
    if not (a > 0 and math.isfinite(a) and math.isfinite(b)):
        raise InvalidInputError("lift scale must be positive and finite", details={"a": a, "b": b})
    p = a * np.array(design.one_sided)
    p[0] = p[0] + b
    seq = AutocorrSequence(one_sided=p, domain=design.domain, lift_a=a, lift_b=b)
    if seq.p0 <= 0:
        raise NegativeSpectrumError("lifted autocorrelation has p[0] <= 0", details={"p0": seq.p0})

    lowest, where = minimum_power(seq, density)
    logger.debug("lifted spectrum minimum %.3e at %.6f pi", lowest, where / math.pi)
    if lowest < -psd_eps * seq.p0:
        raise NegativeSpectrumError(
            f"lifted spectrum is negative ({lowest:.3e}) at {where / math.pi:.6f} pi",
            details={"min_power": lowest, "freq_pi": where / math.pi, "p0": seq.p0},
        )
    return seq


def _band_values(power, spec: DesignSpec, density: Optional[int]):
    """Grid and refined-extremum samples of P, split into passband and stopband."""
    basis = BasisKind.for_spec(spec)
    grid = build_grid(spec.bands, basis.dimension, density or settings.CERTIFY_DENSITY)
    values = power(grid.omegas)
    maxima, minima = local_extrema(values, grid.band_index)
    w_max, v_max = polish_extrema(power, grid.omegas, maxima, maximize=True)
    w_min, v_min = polish_extrema(power, grid.omegas, minima, maximize=False)
    omegas = np.concatenate([grid.omegas, w_max, w_min])
    samples = np.concatenate([values, v_max, v_min])
    flags = np.concatenate([grid.in_passband, grid.in_passband[maxima], grid.in_passband[minima]])
    return omegas, samples, flags


def validate_constraints(p: AutocorrSequence, spec: DesignSpec, *, tol: Optional[float] = None,
                         psd_eps: Optional[float] = None, density: Optional[int] = None) -> ConstraintReport:
    """Report the passband symmetry, nonnegativity and ratio checks of P."""
    tol = settings.CONSTRAINT_TOL if tol is None else tol
    psd_eps = settings.PSD_EPS if psd_eps is None else psd_eps
    if p.order != spec.order:
        raise InvalidInputError(
            f"autocorrelation order {p.order} does not match spec order {spec.order}")
    if p.domain != spec.coeff_domain:
        raise InvalidInputError(f"{p.domain.value} autocorrelation given for a {spec.coeff_domain.value} spec")

    power = _power(p)
    _, samples, flags = _band_values(power, spec, density)
    passband = samples[flags]
    stopband = samples[~flags]
    top = math.sqrt(max(float(passband.max()), 0.0))
    bottom = math.sqrt(max(float(passband.min()), 0.0))
    passband_max = top - 1.0
    passband_min = 1.0 - bottom
    delta_p = max(passband_max, passband_min)
    delta_s = math.sqrt(max(float(stopband.max()), 0.0))
    ratio = delta_p / delta_s if delta_s > 0 else math.inf

    lowest, where = minimum_power(p)
    report = ConstraintReport(
        passband_max=passband_max,
        passband_min=passband_min,
        delta_p=delta_p,
        delta_s=delta_s,
        ratio=ratio,
        min_power=lowest,
        min_power_freq=where / math.pi,
        symmetric_ok=abs(passband_max - passband_min) <= tol,
        nonnegative_ok=lowest >= -psd_eps * p.p0,
        ratio_ok=math.isfinite(ratio) and abs(ratio - spec.k_des) <= tol * spec.k_des,
    )
    if not report.all_ok:
        logger.warning("constraint check failed: symmetric=%s nonnegative=%s ratio=%s",
                       report.symmetric_ok, report.nonnegative_ok, report.ratio_ok)
    return report
