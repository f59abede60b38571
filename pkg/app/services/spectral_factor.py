"""Spectral factorization: find h with sum_n h[n+m] conj(h[n]) = p[m].

Two routes are available. Root finding factors z^N P(z) and keeps one member
of every reciprocal zero pair, which allows any phase selection but becomes
inaccurate for long filters. The cepstral route builds the minimum-phase
factor from log P on a dense FFT grid and scales to long filters.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from app.config import settings
from app.errors import DimensionMismatchError, FactorizationError, InvalidInputError
from app.models.design import AutocorrSequence
from app.models.factor import FactorizationReport, FactorMethod, ZeroPair, ZeroSet
from app.models.filter import CoeffDomain, FirFilter, PhaseKind, PhaseSelection
from app.services.spectrum import autocorrelation_of

logger = logging.getLogger(__name__)

# Newton steps applied to each off-circle zero before pairing.
POLISH_STEPS = 3
# Pairing error accepted per unit of eps times the root condition number.
CONDITION_SLACK = 100.0


def _effective_order(p: AutocorrSequence) -> int:
    """Index of the last lag that is not negligible against p[0]."""
    significant = np.flatnonzero(np.abs(p.one_sided) > np.finfo(float).eps * p.p0)
    return int(significant[-1]) if significant.size else 0


def _check_p0(p: AutocorrSequence) -> None:
    if not p.p0 > 0:
        raise InvalidInputError(f"autocorrelation needs p[0] > 0, got {p.p0}", details={"p0": p.p0})


def _pair_on_circle(zeros: np.ndarray, on_circle_tol: float) -> List[ZeroPair]:
    """Group unit-circle zeros into double zeros by angular adjacency."""
    if zeros.size % 2:
        raise FactorizationError(
            f"odd number ({zeros.size}) of zeros on the unit circle; P is negative somewhere",
            details={"zeros": [[z.real, z.imag] for z in zeros]},
        )
    if zeros.size == 0:
        return []
    ordered = zeros[np.argsort(np.angle(zeros))]
    shifted = np.roll(ordered, -1)
    gaps = np.abs(np.angle(shifted / ordered))
    # pairs (0,1),(2,3),... or (1,2),...,(n-1,0) when a double zero straddles -pi
    if gaps[0::2].max() <= gaps[1::2].max():
        firsts, seconds = ordered[0::2], shifted[0::2]
        worst = gaps[0::2].max()
    else:
        firsts, seconds = ordered[1::2], shifted[1::2]
        worst = gaps[1::2].max()
    if worst > math.sqrt(on_circle_tol):
        raise FactorizationError(
            f"unit-circle zeros are not paired (angular gap {worst:.3e})",
            details={"gap": float(worst)},
        )
    pairs = []
    for a, b in zip(firsts, seconds):
        middle = (a + b) / 2.0
        location = complex(middle / abs(middle))
        pairs.append(ZeroPair(inner=location, outer=location, on_circle=True))
    return pairs


def _polish_roots(coeffs: np.ndarray, zeros: np.ndarray) -> np.ndarray:
    """Newton steps on the polynomial, each kept only where it lowers |f|."""
    deriv = np.polyder(coeffs)
    for _ in range(POLISH_STEPS):
        value = np.polyval(coeffs, zeros)
        slope = np.polyval(deriv, zeros)
        with np.errstate(divide="ignore", invalid="ignore"):
            stepped = zeros - value / slope
        better = np.isfinite(stepped)
        better[better] = np.abs(np.polyval(coeffs, stepped[better])) < np.abs(value[better])
        zeros = np.where(better, stepped, zeros)
    return zeros


def _root_condition(coeffs: np.ndarray, zeros: np.ndarray) -> np.ndarray:
    """Relative condition number of each zero under relative coefficient perturbations."""
    moduli = np.abs(zeros)
    slope = np.abs(np.polyval(np.polyder(coeffs), zeros))
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = np.polyval(np.abs(coeffs), moduli) / (moduli * slope)
    return np.where(np.isfinite(kappa), kappa, np.inf)


def factor_roots(p: AutocorrSequence, *, pairing_tol: Optional[float] = None,
                 on_circle_tol: Optional[float] = None,
                 root_limit: Optional[int] = None) -> ZeroSet:
    """Zeros of z^N P(z) from a balanced companion-matrix eigenvalue problem."""
    pairing_tol = settings.PAIRING_TOL if pairing_tol is None else pairing_tol
    on_circle_tol = settings.ON_CIRCLE_TOL if on_circle_tol is None else on_circle_tol
    root_limit = settings.ROOT_ORDER_LIMIT if root_limit is None else root_limit
    _check_p0(p)
    if p.order > root_limit:
        raise FactorizationError(
            f"order {p.order} exceeds the root-finding limit {root_limit}; use cepstral factorization",
            details={"order": p.order, "limit": root_limit},
        )
    n = _effective_order(p)
    if n == 0:
        return ZeroSet(pairs=(), order=p.order, p0=p.p0)

    coeffs = AutocorrSequence(one_sided=p.one_sided[: n + 1], domain=p.domain).two_sided()
    zeros = scipy.linalg.eigvals(scipy.linalg.companion(coeffs))
    moduli = np.abs(zeros)
    circle = np.abs(moduli - 1.0) <= on_circle_tol
    inner = zeros[~circle & (moduli < 1.0)]
    outer = zeros[~circle & (moduli > 1.0)]
    if inner.size != outer.size:
        raise FactorizationError(
            f"{inner.size} zeros inside the unit circle but {outer.size} outside",
            details={"inside": int(inner.size), "outside": int(outer.size)},
        )

    off_pairs = []
    if inner.size:
        inner = _polish_roots(coeffs, inner)
        outer = _polish_roots(coeffs, outer)
        cost = np.abs(inner[:, None] * np.conj(outer[None, :]) - 1.0)
        rows, cols = linear_sum_assignment(cost)
        errors = cost[rows, cols]
        eps = np.finfo(float).eps
        allowed = np.maximum(
            pairing_tol,
            CONDITION_SLACK * eps * (_root_condition(coeffs, inner[rows]) + _root_condition(coeffs, outer[cols])),
        )
        if np.any(errors > allowed):
            worst = int(np.argmax(errors / allowed))
            raise FactorizationError(
                f"zeros are not reciprocal within {allowed[worst]:.3e} (error {errors[worst]:.3e})",
                details={"error": float(errors[worst]), "allowed": float(allowed[worst]),
                         "pairing_tol": pairing_tol},
            )
        # each pair is made exactly reciprocal around the mean of its two estimates
        off_pairs = []
        for i, j in zip(rows, cols):
            z = (inner[i] + 1.0 / np.conj(outer[j])) / 2.0
            off_pairs.append(ZeroPair(inner=complex(z), outer=complex(1.0 / np.conj(z))))
        off_pairs.sort(key=lambda z: (np.angle(z.inner), abs(z.inner)))

    on_pairs = _pair_on_circle(zeros[circle], on_circle_tol)
    on_pairs.sort(key=lambda z: np.angle(z.location))
    logger.debug("factored order %d: %d off-circle pairs, %d unit-circle pairs",
                 n, len(off_pairs), len(on_pairs))
    return ZeroSet(pairs=tuple(off_pairs + on_pairs), order=p.order, p0=p.p0)


def _to_filter(taps: np.ndarray, domain: CoeffDomain, phase: str) -> FirFilter:
    if domain == CoeffDomain.REAL and np.iscomplexobj(taps):
        if np.max(np.abs(taps.imag)) <= 1e-9 * np.max(np.abs(taps)):
            taps = taps.real
        else:
            domain = CoeffDomain.COMPLEX
    return FirFilter(coeffs=taps, domain=domain, phase=phase)


def select_phase(zeros: ZeroSet, selection: PhaseSelection, p: AutocorrSequence) -> FirFilter:
    """Build h from one member of every zero pair, scaled so that h[0] > 0 and r_h = p."""
    _check_p0(p)
    off = zeros.off_circle
    if selection.kind == PhaseKind.MINIMUM:
        outside = [False] * len(off)
    elif selection.kind == PhaseKind.MAXIMUM:
        outside = [True] * len(off)
    else:
        if len(selection.mask) != len(off):
            raise InvalidInputError(
                f"phase mask has {len(selection.mask)} bits for {len(off)} off-circle zero pairs",
                details={"mask_bits": len(selection.mask), "pairs": len(off)},
            )
        outside = list(selection.mask)
    chosen = [pair.outer if flip else pair.inner for pair, flip in zip(off, outside)]
    chosen += [pair.location for pair in zeros.on_circle]

    monic = np.poly(np.asarray(chosen, dtype=np.complex128)) if chosen else np.ones(1)
    gain = math.sqrt(zeros.p0 / float(np.sum(np.abs(monic) ** 2)))
    taps = gain * monic
    padding = np.zeros(zeros.order + 1 - taps.size)
    if selection.kind == PhaseKind.MAXIMUM:
        taps = np.concatenate([padding, taps])
    else:
        taps = np.concatenate([taps, padding])
    return _to_filter(taps, p.domain, selection.label)


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


def _cepstral_taps(p: AutocorrSequence, size: int, floor: float, shift: float) -> np.ndarray:
    """Minimum-phase factor of P + shift on a ``size``-point grid, rescaled to energy p[0]."""
    n = p.order
    lags = np.zeros(size, dtype=np.complex128)
    lags[: n + 1] = p.one_sided
    lags[0] += shift
    if n:
        lags[size - n:] = np.conj(p.one_sided[1:][::-1])
    power = np.fft.fft(lags).real
    clipped = int(np.count_nonzero(power < floor))
    if clipped:
        logger.debug("cepstral factor: %d of %d spectrum samples floored", clipped, size)
    cepstrum = np.fft.ifft(np.log(np.maximum(power, floor)))
    folded = np.zeros(size, dtype=np.complex128)
    half = size // 2
    folded[0] = cepstrum[0] / 2.0
    folded[1:half] = cepstrum[1:half]
    folded[half] = cepstrum[half] / 2.0
    taps = np.fft.ifft(np.exp(np.fft.fft(folded)))[: n + 1]
    if shift:
        taps = taps / math.sqrt(1.0 + shift / p.p0)
    if p.domain == CoeffDomain.REAL:
        taps = taps.real
    return taps


def minimum_phase_cepstral(p: AutocorrSequence, fft_len: Optional[int] = None, *,
                           psd_eps: Optional[float] = None,
                           max_retries: Optional[int] = None,
                           residual_tol: Optional[float] = None) -> FirFilter:
    """Minimum-phase factor from the folded cepstrum of log P.

    Double zeros of P on the unit circle limit the plain construction to an
    accuracy of order 1/fft_len. When the round-trip residual misses
    ``residual_tol``, retries factor P + eps p[0] (eps =
    CEPSTRAL_REGULARIZATION) on a larger grid, which moves those zeros just
    off the circle; the rescaled factor then reproduces p to about eps p[0].
    """
    psd_eps = settings.PSD_EPS if psd_eps is None else psd_eps
    max_retries = settings.CEPSTRAL_MAX_RETRIES if max_retries is None else max_retries
    residual_tol = settings.CEPSTRAL_RESIDUAL_TOL if residual_tol is None else residual_tol
    _check_p0(p)
    n = p.order
    size = fft_len or _next_pow2(settings.CEPSTRAL_OVERSAMPLING * (2 * n + 1))
    if size < 2 * n + 2:
        raise InvalidInputError(f"FFT length {size} is too short for order {n}",
                                details={"fft_len": size, "order": n})

    floor = max(psd_eps * p.p0, np.finfo(float).tiny)
    shift = 0.0
    residual = math.inf
    for attempt in range(max_retries + 1):
        taps = _cepstral_taps(p, size, floor, shift)
        residual = float(np.max(np.abs(autocorrelation_of(taps) - p.one_sided)))
        if residual <= residual_tol * p.p0:
            return _to_filter(taps, p.domain, PhaseKind.MINIMUM.value)
        logger.info("cepstral residual %.3e above tolerance at FFT length %d (attempt %d)",
                    residual, size, attempt + 1)
        used = size
        shift = settings.CEPSTRAL_REGULARIZATION * p.p0
        size = max(2 * size, _next_pow2(settings.CEPSTRAL_REGULARIZED_FFT))

    raise FactorizationError(
        f"cepstral factorization residual {residual:.3e} exceeds {residual_tol:g} p[0]; "
        "increase the FFT length",
        details={"residual": residual, "fft_len": used},
    )


def reflect(h: FirFilter) -> FirFilter:
    """Maximum-phase counterpart of a minimum-phase filter, h[n] -> conj(h[N-n])."""
    taps = np.conj(h.coeffs[::-1])
    lead = taps[0]
    if abs(lead) > 0:
        taps = taps * (np.conj(lead) / abs(lead))
    return _to_filter(np.asarray(taps), h.domain, PhaseKind.MAXIMUM.value)


def verify_factorization(h: FirFilter, p: AutocorrSequence, selection: Optional[PhaseSelection] = None,
                         tol: Optional[float] = None, root_limit: Optional[int] = None) -> FactorizationReport:
    """Autocorrelation residual of h against p, plus the zero-location check when affordable."""
    tol = settings.CEPSTRAL_RESIDUAL_TOL if tol is None else tol
    root_limit = settings.ROOT_ORDER_LIMIT if root_limit is None else root_limit
    if h.order != p.order:
        raise DimensionMismatchError(f"filter order {h.order} does not match autocorrelation order {p.order}")
    residual = float(np.max(np.abs(autocorrelation_of(h) - p.one_sided)))
    relative = residual / p.p0 if p.p0 > 0 else math.inf

    phase_ok = min_mod = max_mod = None
    if h.order <= root_limit:
        zeros = np.roots(h.coeffs)
        if zeros.size:
            moduli = np.abs(zeros)
            min_mod, max_mod = float(moduli.min()), float(moduli.max())
            slack = settings.ON_CIRCLE_TOL
            if selection is not None and selection.kind == PhaseKind.MINIMUM:
                phase_ok = max_mod <= 1.0 + slack
            elif selection is not None and selection.kind == PhaseKind.MAXIMUM:
                phase_ok = min_mod >= 1.0 - slack
    return FactorizationReport(
        residual=residual,
        relative_residual=relative,
        within_tol=relative <= tol,
        phase_ok=phase_ok,
        min_zero_modulus=min_mod,
        max_zero_modulus=max_mod,
    )


def factor(p: AutocorrSequence, selection: PhaseSelection, method: FactorMethod = FactorMethod.AUTO, *,
           root_limit: Optional[int] = None, fft_len: Optional[int] = None,
           psd_eps: Optional[float] = None) -> Tuple[FirFilter, FactorMethod, Optional[ZeroSet]]:
    """Dispatch to root finding or the cepstral route; returns the factor, the route and any zero set."""
    root_limit = settings.ROOT_ORDER_LIMIT if root_limit is None else root_limit
    method = FactorMethod(method)
    if method == FactorMethod.AUTO:
        method = FactorMethod.ROOTS if p.order <= root_limit else FactorMethod.CEPSTRAL

    if method == FactorMethod.ROOTS:
        zeros = factor_roots(p, root_limit=root_limit)
        return select_phase(zeros, selection, p), method, zeros

    if selection.kind == PhaseKind.EXPLICIT:
        raise FactorizationError(
            "explicit zero selection needs root-finding factorization",
            details={"order": p.order, "limit": root_limit},
        )
    h = minimum_phase_cepstral(p, fft_len, psd_eps=psd_eps)
    if selection.kind == PhaseKind.MAXIMUM:
        h = reflect(h)
    return h, method, None
