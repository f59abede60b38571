"""Weighted minimax (Chebyshev) approximation by multiple exchange.

The zero-phase response is G(w) = sum_j theta_j phi_j(w) over a cosine basis
(real filters) or a cosine-and-sine basis (complex filters). The weighted
error E = W (G - D) uses W = 1, D = 1 on passbands and W = K, D = 0 on
stopbands.
"""
import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from app.config import settings
from app.errors import ConvergenceError, IllConditionedError, InvalidInputError
from app.models.design import BasisKind, ZeroPhaseDesign
from app.models.filter import BandSpec, FirFilter, FrequencyGrid
from app.services.spectrum import local_extrema, polish_extrema, segments, zero_phase_value

logger = logging.getLogger(__name__)

# Largest condition number accepted for the dense reference system.
MAX_CONDITION = 1e13
# Candidates below |delta| (1 - ACCEPT_RTOL) are not extrema of the current error.
ACCEPT_RTOL = 1e-9
# Largest grid evaluated in one block by the barycentric formula.
EVAL_BLOCK = 4096
# Fewest grid points per basis function.
MIN_DENSITY = 4


def build_grid(bands: BandSpec, basis_size: int, density: Optional[int] = None) -> FrequencyGrid:
    """Chebyshev-Lobatto points per band, about ``density`` points per basis function overall."""
    density = settings.GRID_DENSITY if density is None else density
    if basis_size < 1:
        raise InvalidInputError(f"basis size must be positive, got {basis_size}")
    if density < MIN_DENSITY:
        raise InvalidInputError(f"grid density must be at least {MIN_DENSITY}, got {density}")

    widths = np.array([band.width for band in bands.bands])
    proper = widths > 0
    counts = np.ones(widths.size, dtype=int)
    if proper.any():
        budget = max(density * basis_size - int((~proper).sum()), 2 * int(proper.sum()))
        share = widths[proper] / widths[proper].sum() * budget
        base = np.floor(share).astype(int)
        leftover = budget - int(base.sum())
        order = np.argsort(-(share - base), kind="stable")
        base[order[:leftover]] += 1
        counts[proper] = np.maximum(base, 2)

    omegas, index, flags = [], [], []
    for i, (band, n) in enumerate(zip(bands.bands, counts)):
        lo, hi = band.radians
        if n == 1:
            points = np.array([lo])
        else:
            t = np.cos(math.pi * np.arange(n - 1, -1, -1) / (n - 1))
            points = lo + (hi - lo) * (t + 1.0) / 2.0
            points[0], points[-1] = lo, hi
        omegas.append(points)
        index.append(np.full(points.size, i))
        flags.append(np.full(points.size, band.is_passband))

    return FrequencyGrid(
        omegas=np.concatenate(omegas),
        band_index=np.concatenate(index),
        in_passband=np.concatenate(flags),
    )


class ReferenceSolution:
    """Response that levels the weighted error to +-delta on a reference set."""

    def __init__(self, refs: np.ndarray, in_passband: np.ndarray, k: float, basis: BasisKind,
                 delta: float, evaluate: Callable[[np.ndarray], np.ndarray],
                 one_sided: Optional[np.ndarray] = None):
        self.refs = refs
        self.in_passband = in_passband
        self.k = k
        self.basis = basis
        self.delta = delta
        self._evaluate = evaluate
        self._one_sided = one_sided

    def response(self, omegas: np.ndarray) -> np.ndarray:
        return self._evaluate(np.asarray(omegas, dtype=float))

    def error(self, omegas: np.ndarray, in_passband: np.ndarray) -> np.ndarray:
        weight = np.where(in_passband, 1.0, self.k)
        desired = np.where(in_passband, 1.0, 0.0)
        return weight * (self.response(omegas) - desired)

    def coefficients(self) -> np.ndarray:
        """One-sided c[0..M] of the current response."""
        if self._one_sided is not None:
            return self._one_sided
        m = self.basis.m
        size = 2 * m + 1
        samples = self.response(2.0 * math.pi * np.arange(size) / size)
        return np.fft.rfft(samples).real[: m + 1] / size


def _log_products(nodes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """log|prod_{j != i} (x_i - x_j)| and its sign, for each i."""
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise IllConditionedError("reference contains coincident nodes",
                                  details={"nodes": nodes.tolist()})
    return np.sum(np.log(np.abs(diff)), axis=1), np.prod(np.sign(diff), axis=1)


def _barycentric(nodes: np.ndarray, values: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    logs, signs = _log_products(nodes)
    weights = signs * np.exp(logs.min() - logs)

    def evaluate(omegas: np.ndarray) -> np.ndarray:
        x = np.cos(np.atleast_1d(omegas))
        out = np.empty(x.shape)
        for start in range(0, x.size, EVAL_BLOCK):
            block = x[start:start + EVAL_BLOCK]
            diff = block[:, None] - nodes[None, :]
            hit = diff == 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = weights / diff
                vals = (terms @ values) / terms.sum(axis=1)
            rows, cols = np.nonzero(hit)
            vals[rows] = values[cols]
            out[start:start + EVAL_BLOCK] = vals
        return out

    return evaluate


def _solve_cosine(refs, in_passband, k, basis) -> ReferenceSolution:
    m = basis.m
    nodes = np.cos(refs)
    logs, signs = _log_products(nodes)
    a = signs * np.exp(logs.min() - logs)
    weight = np.where(in_passband, 1.0, k)
    desired = np.where(in_passband, 1.0, 0.0)
    alternating = (-1.0) ** np.arange(refs.size)
    denominator = a @ (alternating / weight)
    if not np.isfinite(denominator) or denominator == 0.0:
        raise IllConditionedError("reference system is singular",
                                  details={"refs_pi": (refs / math.pi).tolist()})
    delta = -(a @ desired) / denominator
    values = desired + alternating * delta / weight
    evaluate = _barycentric(nodes[: m + 1], values[: m + 1])
    return ReferenceSolution(refs, in_passband, k, basis, float(delta), evaluate)


def basis_matrix(omegas: np.ndarray, basis: BasisKind) -> np.ndarray:
    """Columns 1, 2cos(nw) and, for complex filters, 2sin(nw)."""
    n = np.arange(1, basis.m + 1)
    phase = np.outer(omegas, n)
    columns = [np.ones((omegas.size, 1)), 2.0 * np.cos(phase)]
    if basis.is_complex:
        columns.append(2.0 * np.sin(phase))
    return np.hstack(columns)


def theta_to_one_sided(theta: np.ndarray, basis: BasisKind) -> np.ndarray:
    m = basis.m
    if not basis.is_complex:
        return np.asarray(theta[: m + 1], dtype=float)
    c = np.empty(m + 1, dtype=np.complex128)
    c[0] = theta[0]
    c[1:] = theta[1: m + 1] + 1j * theta[m + 1: 2 * m + 1]
    return c


def _solve_dense(refs, in_passband, k, basis) -> ReferenceSolution:
    weight = np.where(in_passband, 1.0, k)
    desired = np.where(in_passband, 1.0, 0.0)
    alternating = (-1.0) ** np.arange(refs.size)
    system = np.hstack([basis_matrix(refs, basis), (-alternating / weight)[:, None]])
    condition = np.linalg.cond(system)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise IllConditionedError(
            f"reference system is ill-conditioned (cond={condition:.3e})",
            details={"condition": float(condition), "refs_pi": (refs / math.pi).tolist()},
        )
    solution = scipy.linalg.solve(system, desired)
    c = theta_to_one_sided(solution[:-1], basis)
    return ReferenceSolution(refs, in_passband, k, basis, float(solution[-1]),
                             lambda w: zero_phase_value(c, basis.domain, w), one_sided=c)


def solve_reference_system(refs: np.ndarray, bands: BandSpec, k: float,
                           basis: BasisKind) -> ReferenceSolution:
    """Solve W(w_i)(G(w_i) - D(w_i)) = (-1)^i delta on a reference set."""
    refs = np.sort(np.asarray(refs, dtype=float))
    if refs.size != basis.reference_count:
        raise InvalidInputError(
            f"expected {basis.reference_count} reference frequencies, got {refs.size}")
    if not (math.isfinite(k) and k > 0):
        raise InvalidInputError(f"weight must be positive and finite, got {k}")
    in_passband = bands.is_passband_at(refs)
    if basis.is_complex:
        return _solve_dense(refs, in_passband, k, basis)
    return _solve_cosine(refs, in_passband, k, basis)


def _merge_runs(omegas: np.ndarray, errors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Keep the largest |E| of every run of equal signs."""
    kept_w, kept_e = [], []
    for w, e in zip(omegas, errors):
        if kept_e and np.sign(e) == np.sign(kept_e[-1]):
            if abs(e) > abs(kept_e[-1]):
                kept_w[-1], kept_e[-1] = w, e
            continue
        kept_w.append(w)
        kept_e.append(e)
    return np.asarray(kept_w), np.asarray(kept_e)


def _trim(omegas: np.ndarray, errors: np.ndarray, required: int) -> Tuple[np.ndarray, np.ndarray]:
    """Drop the weakest extrema while preserving alternation."""
    w, e = list(omegas), list(errors)
    while len(e) > required:
        mags = np.abs(e)
        i = int(np.argmin(mags))
        last = len(e) - 1
        if 0 < i < last and len(e) - required == 1:
            drop = [0] if mags[0] <= mags[last] else [last]
        elif i in (0, last):
            drop = [i]
        else:
            drop = [i, i - 1] if mags[i - 1] <= mags[i + 1] else [i, i + 1]
        for j in sorted(drop, reverse=True):
            del w[j]
            del e[j]
    return np.asarray(w), np.asarray(e)


def exchange_step(solution: ReferenceSolution, grid: FrequencyGrid,
                  continuous: bool = True) -> Tuple[np.ndarray, np.ndarray, float]:
    """Pick the next reference set from the extrema of the current error.

    Returns the new references, the signed error there and the peak |E| seen
    over all candidates.
    """
    omegas = grid.omegas
    flags = grid.in_passband
    errors = solution.error(omegas, flags)
    maxima, minima = local_extrema(errors, grid.band_index)
    peaks = maxima[errors[maxima] > 0]
    troughs = minima[errors[minima] < 0]

    ref_e = solution.error(solution.refs, solution.in_passband)
    cand_w = [solution.refs]
    cand_e = [ref_e]
    bounds = np.array(segments(grid.band_index))
    edges = np.unique(np.concatenate([bounds[:, 0], bounds[:, 1] - 1]))
    cand_w.append(omegas[edges])
    cand_e.append(errors[edges])

    if continuous:
        def signed_error(w, passband):
            return solution.error(w, passband)

        for indices, maximize in ((peaks, True), (troughs, False)):
            w, e = polish_extrema(signed_error, omegas, indices, maximize,
                                  args=(flags[indices].astype(float),))
            cand_w.append(w)
            cand_e.append(e)
    else:
        cand_w.append(omegas[peaks])
        cand_e.append(errors[peaks])
        cand_w.append(omegas[troughs])
        cand_e.append(errors[troughs])

    cand_w = np.concatenate(cand_w)
    cand_e = np.concatenate(cand_e)
    peak = float(np.max(np.abs(cand_e)))

    # references stay candidates even when rounding leaves their |E| below |delta|
    level = min(abs(solution.delta) * (1.0 - ACCEPT_RTOL), float(np.min(np.abs(ref_e))))
    keep = np.abs(cand_e) >= level
    keep[: solution.refs.size] = True
    cand_w, cand_e = cand_w[keep], cand_e[keep]
    order = np.lexsort((-np.abs(cand_e), cand_w))
    cand_w, cand_e = cand_w[order], cand_e[order]
    cand_w, cand_e = _merge_runs(cand_w, cand_e)

    required = solution.basis.reference_count
    if cand_w.size < required:
        raise ConvergenceError(
            f"exchange found {cand_w.size} alternating extrema, needs {required}",
            details={"found": int(cand_w.size), "required": required, "delta": solution.delta},
        )
    new_w, new_e = _trim(cand_w, cand_e, required)
    return new_w, new_e, peak


def initial_references(grid: FrequencyGrid, count: int) -> np.ndarray:
    if grid.size < count:
        raise InvalidInputError(
            f"grid has {grid.size} points, needs at least {count}",
            details={"grid_size": grid.size, "required": count},
        )
    picks = np.round(np.linspace(0, grid.size - 1, count)).astype(int)
    return grid.omegas[picks]


def design_zero_phase(bands: BandSpec, k: float, basis: BasisKind,
                      grid: Optional[FrequencyGrid] = None, *,
                      density: Optional[int] = None,
                      initial_refs: Optional[np.ndarray] = None,
                      continuous: bool = True,
                      max_iter: Optional[int] = None,
                      spread_tol: Optional[float] = None,
                      delta_rtol: Optional[float] = None) -> ZeroPhaseDesign:
    """Minimax zero-phase design for a fixed stopband weight ``k``.

    With ``continuous`` set, extrema are refined off the grid, so the result is
    the continuum optimum; otherwise it is the optimum over the grid points.
    """
    if not (math.isfinite(k) and k > 0):
        raise InvalidInputError(f"weight must be positive and finite, got {k}")
    if not basis.is_complex and bands.lowest < 0:
        raise InvalidInputError("the cosine basis needs bands within [0, 1] (units of pi)")
    max_iter = settings.REMEZ_MAX_ITER if max_iter is None else max_iter
    spread_tol = settings.REMEZ_SPREAD_TOL if spread_tol is None else spread_tol
    delta_rtol = settings.REMEZ_DELTA_RTOL if delta_rtol is None else delta_rtol
    if grid is None:
        grid = build_grid(bands, basis.dimension, density)

    required = basis.reference_count
    refs = None
    if initial_refs is not None and np.asarray(initial_refs).size == required:
        refs = np.sort(np.asarray(initial_refs, dtype=float))
        if np.any(bands.locate(refs) < 0) or np.unique(refs).size != required:
            refs = None
    if refs is None:
        refs = initial_references(grid, required)

    history = []
    previous = None
    spread = float("inf")
    for iteration in range(1, max_iter + 1):
        solution = solve_reference_system(refs, bands, k, basis)
        history.append(abs(solution.delta))
        stalled = previous is not None and abs(abs(solution.delta) - previous) <= delta_rtol * abs(solution.delta)
        try:
            new_refs, new_errors, peak = exchange_step(solution, grid, continuous)
        except ConvergenceError:
            if not stalled:
                raise
            logger.info("exchange found no new reference after delta settled; keeping the current one")
            new_refs = solution.refs
            new_errors = solution.error(new_refs, solution.in_passband)
            peak = float(max(np.max(np.abs(solution.error(grid.omegas, grid.in_passband))),
                             np.max(np.abs(new_errors))))
        mags = np.abs(new_errors)
        spread = float((peak - mags.min()) / peak) if peak > 0 else 0.0
        logger.debug("exchange %d: |delta|=%.12e spread=%.3e", iteration, abs(solution.delta), spread)
        if spread <= spread_tol or stalled:
            if stalled and spread > math.sqrt(spread_tol):
                logger.warning("exchange stalled at spread %.3e after %d iterations", spread, iteration)
            return ZeroPhaseDesign(
                one_sided=solution.coefficients(),
                basis=basis,
                applied_weight=k,
                delta_p=peak,
                extremal_freqs=new_refs,
                iterations=iteration,
                delta_history=tuple(history),
            )
        previous = abs(solution.delta)
        refs = new_refs

    raise ConvergenceError(
        f"exchange did not converge in {max_iter} iterations",
        details={"iterations": max_iter, "spread": spread, "delta": history[-1] if history else None,
                 "refs_pi": (refs / math.pi).tolist()},
    )


def lp_oracle_design(bands: BandSpec, k: float, basis: BasisKind,
                     grid: FrequencyGrid) -> ZeroPhaseDesign:
    """Minimise max |E| over the grid as a linear program (dual simplex)."""
    matrix = basis_matrix(grid.omegas, basis)
    weight = grid.weights(k)
    desired = grid.desired()
    dim = matrix.shape[1]
    weighted = weight[:, None] * matrix
    ones = np.ones((grid.size, 1))
    a_ub = np.vstack([np.hstack([weighted, -ones]), np.hstack([-weighted, -ones])])
    b_ub = np.concatenate([weight * desired, -weight * desired])
    objective = np.zeros(dim + 1)
    objective[-1] = 1.0
    bounds = [(None, None)] * dim + [(0, None)]
    res = linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs-ds")
    if not res.success:
        raise ConvergenceError(f"linear program failed: {res.message}", details={"status": int(res.status)})
    theta = res.x[:dim]
    return ZeroPhaseDesign(
        one_sided=theta_to_one_sided(theta, basis),
        basis=basis,
        applied_weight=k,
        delta_p=float(res.x[-1]),
    )


def linear_phase_design(order: int, bands: BandSpec, k: float,
                        density: Optional[int] = None) -> FirFilter:
    """Symmetric (type I) filter whose amplitude is the minimax cosine design at weight ``k``."""
    if order < 0 or order % 2:
        raise InvalidInputError(f"linear-phase baseline needs an even order, got {order}")
    m = order // 2
    design = design_zero_phase(bands, k, BasisKind.cosine(m), density=density)
    g = np.asarray(design.one_sided, dtype=float)
    taps = g[np.abs(np.arange(order + 1) - m)]
    return FirFilter(coeffs=taps, phase="linear")
