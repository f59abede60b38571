"""Optimality certificate for a designed filter.

The magnitude |H| is compared against an adjusted error

    E'(w) = |H(w)| - 1                  on passbands,
    E'(w) = 2 k (|H(w)| - delta_s / 2)  on stopbands,

where delta_p is the peak of the weighted error (weight 1 on passbands, k on
stopbands) and delta_s = delta_p / k. The peaks of E' all sit at level delta_p
for a ripple-balanced design. A filter is certified optimal when E' alternates
in sign at least N+2 times (2N+2 for complex filters) at that level.
"""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from app.config import settings
from app.errors import DimensionMismatchError
from app.models.certificate import AdjustedTargets, Certificate, CertificateSource, DeviationReport
from app.models.design import AutocorrSequence, BasisKind
from app.models.filter import CoeffDomain, DesignSpec, FirFilter
from app.services.chebyshev import build_grid
from app.services.spectrum import (
    evaluate_frequency_response,
    local_extrema,
    polish_extrema,
    segments,
    zero_phase_value,
)

logger = logging.getLogger(__name__)

Certifiable = Union[FirFilter, AutocorrSequence]


def _check_compatible(source: Certifiable, spec: DesignSpec) -> None:
    if source.order != spec.order:
        raise DimensionMismatchError(
            f"order {source.order} does not match spec order {spec.order}",
            details={"order": source.order, "spec_order": spec.order},
        )
    complex_source = (source.is_complex if isinstance(source, FirFilter)
                      else source.domain == CoeffDomain.COMPLEX)
    if complex_source and spec.coeff_domain == CoeffDomain.REAL:
        raise DimensionMismatchError("complex coefficients cannot be certified against a real spec")


def _power(source: Certifiable):
    if isinstance(source, FirFilter):
        def evaluate(omegas):
            return np.abs(evaluate_frequency_response(source, omegas)) ** 2
    else:
        def evaluate(omegas):
            return np.maximum(zero_phase_value(source.one_sided, source.domain, omegas), 0.0)
    return evaluate


def _candidates(source: Certifiable, spec: DesignSpec,
                density: Optional[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Band edges plus refined interior extrema of |H|^2, sorted by frequency.

    Returns frequencies (radians), |H| and the passband flag at each one.
    """
    power = _power(source)
    basis = BasisKind.for_spec(spec)
    grid = build_grid(spec.bands, basis.dimension, density or settings.CERTIFY_DENSITY)
    values = power(grid.omegas)
    maxima, minima = local_extrema(values, grid.band_index)
    w_max, v_max = polish_extrema(power, grid.omegas, maxima, maximize=True)
    w_min, v_min = polish_extrema(power, grid.omegas, minima, maximize=False)
    bounds = np.array(segments(grid.band_index))
    edges = np.unique(np.concatenate([bounds[:, 0], bounds[:, 1] - 1]))

    omegas = np.concatenate([grid.omegas[edges], w_max, w_min])
    power_values = np.concatenate([values[edges], v_max, v_min])
    flags = np.concatenate([grid.in_passband[edges], grid.in_passband[maxima], grid.in_passband[minima]])
    order = np.argsort(omegas, kind="stable")
    magnitude = np.sqrt(np.maximum(power_values[order], 0.0))
    return omegas[order], magnitude, flags[order]


def _deviations(omegas, magnitude, flags, k_des: float) -> DeviationReport:
    pass_w, pass_mag = omegas[flags], magnitude[flags]
    stop_w, stop_mag = omegas[~flags], magnitude[~flags]
    above = pass_mag - 1.0
    below = 1.0 - pass_mag
    worst = np.maximum(above, below)
    i_pass = int(np.argmax(worst))
    i_stop = int(np.argmax(stop_mag))
    pass_dev = float(worst[i_pass])
    stop_peak = float(stop_mag[i_stop])
    # weighted error: 1 on passbands, k_des on stopbands
    if pass_dev >= k_des * stop_peak:
        delta_p, arg_max = pass_dev, pass_w[i_pass]
    else:
        delta_p, arg_max = k_des * stop_peak, stop_w[i_stop]
    return DeviationReport(
        delta_p=delta_p,
        delta_s=delta_p / k_des,
        arg_max_freq=float(arg_max / math.pi),
        passband_deviation=pass_dev,
        stopband_peak=stop_peak,
        passband_peak=float(above.max()),
        passband_trough=float(below.max()),
        passband_peak_freq=float(pass_w[i_pass] / math.pi),
        stopband_peak_freq=float(stop_w[i_stop] / math.pi),
    )


def measure_deviations(h: Certifiable, spec: DesignSpec, density: Optional[int] = None) -> DeviationReport:
    """Peak weighted deviation of |H| over all bands, refined off the grid."""
    _check_compatible(h, spec)
    return _deviations(*_candidates(h, spec, density), spec.k_des)


def adjusted_targets(spec: DesignSpec, deviations: DeviationReport) -> AdjustedTargets:
    return AdjustedTargets(
        d_prime_stop=deviations.delta_s / 2.0,
        w_prime_stop=2.0 * spec.k_des,
        level=deviations.delta_p,
    )


def _adjusted(magnitude: np.ndarray, in_passband: np.ndarray, targets: AdjustedTargets) -> np.ndarray:
    return np.where(in_passband, magnitude - 1.0,
                    targets.w_prime_stop * (magnitude - targets.d_prime_stop))


def adjusted_error(h: Certifiable, spec: DesignSpec, targets: AdjustedTargets, omegas) -> np.ndarray:
    """E' at the given frequencies (radians); every frequency must lie in a band."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    magnitude = np.sqrt(_power(h)(omegas))
    return _adjusted(magnitude, spec.bands.is_passband_at(omegas), targets)


def count_alternations(omegas, errors, level: float,
                       rel_tol: Optional[float] = None) -> Tuple[int, np.ndarray]:
    """Number of sign runs among samples with |E'| >= level (1 - rel_tol).

    Returns the count and, per run, the frequency of its largest |E'|.
    """
    rel_tol = settings.ALTERNATION_RTOL if rel_tol is None else rel_tol
    omegas = np.asarray(omegas, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if level <= 0:
        return 0, np.empty(0)
    keep = np.abs(errors) >= level * (1.0 - rel_tol)
    order = np.argsort(omegas[keep], kind="stable")
    w, e = omegas[keep][order], errors[keep][order]
    locations = []
    best = -1.0
    previous = 0.0
    for freq, value in zip(w, e):
        sign = np.sign(value)
        if sign != previous:
            locations.append(freq)
            best = abs(value)
            previous = sign
        elif abs(value) > best:
            locations[-1] = freq
            best = abs(value)
    return len(locations), np.asarray(locations)


def certify(h: Certifiable, spec: DesignSpec, *, rel_tol: Optional[float] = None,
            ratio_tol: Optional[float] = None, density: Optional[int] = None) -> Certificate:
    """Count alternations of E' and check the achieved deviation ratio."""
    rel_tol = settings.ALTERNATION_RTOL if rel_tol is None else rel_tol
    ratio_tol = settings.RATIO_TOL if ratio_tol is None else ratio_tol
    _check_compatible(h, spec)

    omegas, magnitude, flags = _candidates(h, spec, density)
    deviations = _deviations(omegas, magnitude, flags, spec.k_des)
    targets = adjusted_targets(spec, deviations)
    errors = _adjusted(magnitude, flags, targets)
    found, where = count_alternations(omegas, errors, targets.level, rel_tol)
    required = 2 * spec.order + 2 if spec.is_complex else spec.order + 2
    ratio = deviations.ratio
    ratio_ok = math.isfinite(ratio) and abs(ratio - spec.k_des) <= ratio_tol * spec.k_des
    source = CertificateSource.FILTER if isinstance(h, FirFilter) else CertificateSource.AUTOCORRELATION

    logger.info("certificate: %d/%d alternations, ratio %.6g (target %g), source=%s",
                found, required, ratio, spec.k_des, source.value)
    return Certificate(
        alternations_found=found,
        alternations_required=required,
        alternation_freqs=tuple(float(w / math.pi) for w in where),
        deviations=deviations,
        targets=targets,
        ratio_ok=ratio_ok,
        source=source,
    )
