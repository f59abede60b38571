"""Frequency-domain evaluation shared by the design stages.

Frequencies are radians internally; callers that speak in units of pi convert
at the boundary.
"""
import logging
import math
from typing import Callable, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize.elementwise import find_minimum

from app.config import settings
from app.errors import DimensionMismatchError, InvalidInputError
from app.models.filter import CoeffDomain, FirFilter, FrequencyGrid

logger = logging.getLogger(__name__)

Frequencies = Union[FrequencyGrid, np.ndarray]


def as_omegas(freqs: Frequencies) -> np.ndarray:
    if isinstance(freqs, FrequencyGrid):
        return np.asarray(freqs.omegas)
    return np.atleast_1d(np.asarray(freqs, dtype=float))


def _taps(h: Union[FirFilter, np.ndarray]) -> np.ndarray:
    coeffs = h.coeffs if isinstance(h, FirFilter) else np.atleast_1d(np.asarray(h))
    if coeffs.size == 0:
        raise InvalidInputError("empty coefficient sequence")
    return coeffs


def evaluate_frequency_response(h: Union[FirFilter, np.ndarray], freqs: Frequencies) -> np.ndarray:
    """H(e^{jw}) = sum_n h[n] e^{-jwn}."""
    omegas = as_omegas(freqs)
    return P.polyval(np.exp(-1j * omegas), _taps(h))


def magnitude_response(h: Union[FirFilter, np.ndarray], freqs: Frequencies) -> np.ndarray:
    return np.abs(evaluate_frequency_response(h, freqs))


def group_delay(h: Union[FirFilter, np.ndarray], freqs: Frequencies,
                floor: float = None) -> np.ndarray:
    """Group delay in samples; NaN where |H| falls below ``floor`` times its peak."""
    floor = settings.GROUP_DELAY_FLOOR if floor is None else floor
    taps = _taps(h)
    omegas = as_omegas(freqs)
    z = np.exp(-1j * omegas)
    H = P.polyval(z, taps)
    ramp = P.polyval(z, np.arange(taps.size) * taps)
    mag = np.abs(H)
    peak = mag.max() if mag.size else 0.0
    undefined = mag <= floor * peak
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.real(ramp / H)
    tau[undefined] = np.nan
    if np.any(undefined):
        logger.debug("group delay undefined at %d of %d frequencies", int(undefined.sum()), omegas.size)
    return tau


def autocorrelation_of(h: Union[FirFilter, np.ndarray]) -> np.ndarray:
    """One-sided r[m] = sum_n h[n+m] conj(h[n]) for m = 0..N."""
    taps = _taps(h)
    full = np.correlate(taps, taps, mode="full")
    r = full[taps.size - 1:]
    if not np.iscomplexobj(taps):
        return r.real
    return r


def zero_phase_value(one_sided: np.ndarray, domain: CoeffDomain, freqs: Frequencies) -> np.ndarray:
    """G(w) = c[0] + 2 sum_{n>=1} Re(c[n] e^{-jnw}), always real."""
    c = np.atleast_1d(np.asarray(one_sided))
    if c.size == 0:
        raise InvalidInputError("empty one-sided sequence")
    scale = float(np.max(np.abs(c)))
    if abs(np.imag(c[0])) > 1e-12 * max(scale, 1.0):
        raise InvalidInputError("c[0] of a zero-phase sequence must be real")
    if domain == CoeffDomain.REAL and np.iscomplexobj(c) and np.max(np.abs(c.imag)) > 1e-12 * max(scale, 1.0):
        raise DimensionMismatchError("complex one-sided sequence given for the real domain")
    omegas = as_omegas(freqs)
    if c.size == 1:
        return np.full(omegas.shape, float(np.real(c[0])))
    tail = np.concatenate([[0.0], c[1:]])
    return float(np.real(c[0])) + 2.0 * np.real(P.polyval(np.exp(-1j * omegas), tail))


def dense_grid(domain: CoeffDomain, points: int) -> np.ndarray:
    """Uniform grid over [0, pi] (real) or (-pi, pi] (complex)."""
    points = max(int(points), 2)
    if domain == CoeffDomain.COMPLEX:
        return np.linspace(-math.pi, math.pi, points + 1)[1:]
    return np.linspace(0.0, math.pi, points)


def segments(labels: np.ndarray) -> list:
    """Index ranges [start, stop) of consecutive equal labels."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate([[0], cuts])
    stops = np.concatenate([cuts, [labels.size]])
    return list(zip(starts.tolist(), stops.tolist()))


def local_extrema(values: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Interior local maxima and minima of ``values`` inside each labelled segment."""
    values = np.asarray(values)
    maxima, minima = [], []
    for start, stop in segments(labels):
        if stop - start < 3:
            continue
        left = values[start:stop - 2]
        mid = values[start + 1:stop - 1]
        right = values[start + 2:stop]
        is_max = (mid >= left) & (mid >= right) & ((mid > left) | (mid > right))
        is_min = (mid <= left) & (mid <= right) & ((mid < left) | (mid < right))
        maxima.append(np.flatnonzero(is_max) + start + 1)
        minima.append(np.flatnonzero(is_min) + start + 1)
    empty = np.empty(0, dtype=int)
    return (np.concatenate(maxima) if maxima else empty,
            np.concatenate(minima) if minima else empty)


def polish_extrema(fn: Callable[..., np.ndarray], omegas: np.ndarray, indices: np.ndarray,
                   maximize: bool, args: Tuple[np.ndarray, ...] = ()) -> Tuple[np.ndarray, np.ndarray]:
    """Refine grid extrema of ``fn`` to the continuum.

    Each index must have both grid neighbours inside its band; the pair of
    neighbours brackets the search. ``args`` are per-index arrays forwarded to
    ``fn`` elementwise. Points where the search fails or does not improve on
    the grid value stay where they were.
    """
    indices = np.asarray(indices, dtype=int)
    if indices.size == 0:
        return np.empty(0), np.empty(0)
    sign = -1.0 if maximize else 1.0

    def objective(w, *extra):
        w = np.asarray(w, dtype=float)
        flat = [np.broadcast_to(a, w.shape).ravel() for a in extra]
        return sign * fn(w.ravel(), *flat).reshape(w.shape)

    lo = omegas[indices - 1]
    mid = omegas[indices]
    hi = omegas[indices + 1]
    res = find_minimum(objective, (lo, mid, hi), args=tuple(args),
                       tolerances=dict(xatol=1e-15, xrtol=1e-13), maxiter=200)
    found = np.where(np.isfinite(res.x), res.x, mid)
    found = np.clip(found, lo, hi)
    at_found = fn(found, *args)
    at_mid = fn(mid, *args)
    better = sign * at_found <= sign * at_mid
    x = np.where(better, found, mid)
    fx = np.where(better, at_found, at_mid)
    return x, fx


def response_table(h: Union[FirFilter, np.ndarray], freqs: Frequencies,
                   floor: float = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Frequency (units of pi), |H|, |H| in dB and group delay; NaN marks undefined entries."""
    omegas = as_omegas(freqs)
    mag = magnitude_response(h, omegas)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    db[~np.isfinite(db)] = np.nan
    return omegas / math.pi, mag, db, group_delay(h, omegas, floor)
