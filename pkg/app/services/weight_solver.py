"""Search for the stopband weight K that makes the lifted design meet k_des.

For a target ratio k, the lifted passband and stopband deviations of the
zero-phase design at weight K are

    Delta_S(K) = 8 k^2 / (K^2 + 16 k^4 - 8 k^2),   Delta_P(K) = K Delta_S(K).

The exchange algorithm returns the attained deviation Delta_P,res(K), which
grows with K while Delta_P(K) shrinks, so f(K) = Delta_P,res(K) - Delta_P(K)
has a single sign change above the lower bound 4k(k+1).
"""
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.errors import ConvergenceError, InfeasibleError, InvalidInputError
from app.models.design import BasisKind, KSweep, KSweepPoint, WeightEvaluation, WeightSolution, ZeroPhaseDesign
from app.models.filter import DesignSpec
from app.models.result import WeightMethod
from app.services.chebyshev import build_grid, design_zero_phase

logger = logging.getLogger(__name__)


def _check_k_des(k_des: float) -> None:
    if not (math.isfinite(k_des) and k_des > 0):
        raise InvalidInputError(f"k_des must be positive and finite, got {k_des}")


def k_lower_bound(k_des: float) -> float:
    """Smallest admissible weight, 4k(k+1)."""
    _check_k_des(k_des)
    return 4.0 * k_des * (k_des + 1.0)


def delta_s_target(K: float, k_des: float) -> float:
    _check_k_des(k_des)
    denominator = K * K + 16.0 * k_des ** 4 - 8.0 * k_des ** 2
    if not denominator > 0:
        raise InvalidInputError(
            f"weight K={K} is outside the valid domain for k_des={k_des}",
            details={"K": K, "k_des": k_des, "lower_bound": k_lower_bound(k_des)},
        )
    return 8.0 * k_des ** 2 / denominator


def delta_p_target(K: float, k_des: float) -> float:
    return K * delta_s_target(K, k_des)


def lift_coefficients(K: float, k_des: float, delta_p_res: float) -> Tuple[float, float]:
    """Scale a and offset b of the lift P = a G + b."""
    _check_k_des(k_des)
    if not (K > 0 and delta_p_res > 0):
        raise InvalidInputError("lift needs a positive weight and a positive deviation",
                                details={"K": K, "delta_p_res": delta_p_res})
    b = 8.0 * k_des ** 2 / (K * K)
    a = 8.0 * k_des ** 2 / (K * delta_p_res)
    return a, b


class _Objective:
    """Evaluates f(K) and remembers the last reference set for warm starts."""

    def __init__(self, spec: DesignSpec, density: Optional[int]):
        self.spec = spec
        self.basis = BasisKind.for_spec(spec)
        self.grid = build_grid(spec.bands, self.basis.dimension, density)
        self.history: List[WeightEvaluation] = []
        self.designs: dict = {}
        self._refs: Optional[np.ndarray] = None

    def design(self, K: float) -> ZeroPhaseDesign:
        if K not in self.designs:
            design = design_zero_phase(self.spec.bands, K, self.basis, self.grid, initial_refs=self._refs)
            self._refs = design.extremal_freqs
            self.designs[K] = design
            target = delta_p_target(K, self.spec.k_des)
            self.history.append(WeightEvaluation(k=K, delta_p_res=design.delta_p, delta_p_target=target))
            logger.debug("K=%.10g  Delta_P,res=%.12e  Delta_P=%.12e", K, design.delta_p, target)
        return self.designs[K]

    def __call__(self, K: float) -> float:
        return self.design(K).delta_p - delta_p_target(K, self.spec.k_des)

    def converged(self, K: float, tol: float) -> bool:
        return abs(self(K)) <= tol * delta_p_target(K, self.spec.k_des)


def _bracket(objective: _Objective, lower: float, cap: float) -> Tuple[float, float]:
    lo, hi = lower, 4.0 * lower
    if objective(lo) > 0:
        raise InfeasibleError(
            "design deviation already exceeds the target at the weight lower bound",
            details={"K": lo, "delta_p_res": objective.design(lo).delta_p,
                     "delta_p_target": delta_p_target(lo, objective.spec.k_des)},
        )
    while objective(hi) < 0:
        lo = hi
        hi *= 2.0
        if hi > cap:
            raise InfeasibleError(
                f"no sign change of the weight residual below K={cap:g}",
                details={"cap": cap, "last_K": lo},
            )
    return lo, hi


def solve_weight(spec: DesignSpec, *, tol: Optional[float] = None, max_iter: Optional[int] = None,
                 method: Optional[WeightMethod] = None, density: Optional[int] = None,
                 cap: Optional[float] = None) -> WeightSolution:
    """Find K* with |Delta_P,res(K*) - Delta_P(K*)| <= tol Delta_P(K*)."""
    tol = settings.WEIGHT_TOL if tol is None else tol
    max_iter = settings.WEIGHT_MAX_ITER if max_iter is None else max_iter
    method = WeightMethod(method or settings.WEIGHT_METHOD)
    cap = settings.WEIGHT_UPPER_CAP if cap is None else cap

    objective = _Objective(spec, density)
    lower = k_lower_bound(spec.k_des)

    if objective.converged(lower, tol):
        k_star = lower
    else:
        lo, hi = _bracket(objective, lower, cap)
        k_star = _refine(objective, lo, hi, tol, max_iter, method)

    design = objective.design(k_star)
    logger.info("weight solved: K*=%.10g after %d evaluations", k_star, len(objective.history))
    return WeightSolution(
        k_star=k_star,
        design=design,
        delta_p_target=delta_p_target(k_star, spec.k_des),
        delta_s_target=delta_s_target(k_star, spec.k_des),
        k_lower_bound=lower,
        history=tuple(objective.history),
    )


def _refine(objective: _Objective, lo: float, hi: float, tol: float,
            max_iter: int, method: WeightMethod) -> float:
    """Shrink a sign-changing bracket [lo, hi] in log K."""
    for K in (lo, hi):
        if objective.converged(K, tol):
            return K
    u_lo, u_hi = math.log(lo), math.log(hi)
    f_lo, f_hi = objective(lo), objective(hi)
    side = 0
    for _ in range(max_iter):
        if method == WeightMethod.SECANT:
            u = (u_lo * f_hi - u_hi * f_lo) / (f_hi - f_lo)
            if not (u_lo < u < u_hi):
                u = 0.5 * (u_lo + u_hi)
        else:
            u = 0.5 * (u_lo + u_hi)
        K = math.exp(u)
        f = objective(K)
        if objective.converged(K, tol):
            return K
        if f < 0:
            u_lo, f_lo = u, f
            if side == -1 and method == WeightMethod.SECANT:
                f_hi *= 0.5
            side = -1
        else:
            u_hi, f_hi = u, f
            if side == 1 and method == WeightMethod.SECANT:
                f_lo *= 0.5
            side = 1
        if u_hi - u_lo <= 4.0 * np.finfo(float).eps * max(abs(u_hi), 1.0):
            logger.warning("weight bracket collapsed before reaching tolerance")
            return K
    raise ConvergenceError(
        f"weight search did not converge in {max_iter} iterations",
        details={"bracket": [math.exp(u_lo), math.exp(u_hi)], "tol": tol},
    )


def k_sweep(spec: DesignSpec, ks: Iterable[float], *, density: Optional[int] = None) -> KSweep:
    """Tabulate Delta_P,res and Delta_P over the given weights."""
    ks = [float(K) for K in ks]
    if not ks:
        raise InvalidInputError("weight sweep needs at least one K")
    lower = k_lower_bound(spec.k_des)
    below = [K for K in ks if K < lower]
    if below:
        raise InvalidInputError(
            f"weights below the lower bound 4k(k+1) = {lower:g}",
            details={"lower_bound": lower, "below": below},
        )
    objective = _Objective(spec, density)
    points = []
    for K in sorted(ks):
        design = objective.design(K)
        points.append(KSweepPoint(
            k=K,
            delta_p_res=design.delta_p,
            delta_p_target=delta_p_target(K, spec.k_des),
            delta_s_target=delta_s_target(K, spec.k_des),
        ))
    return KSweep(points=tuple(points))
