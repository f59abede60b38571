import enum
from typing import Any, Optional, Tuple

import numpy as np
from pydantic import field_validator, model_validator

from app.errors import InvalidInputError
from app.models.base import FrozenModel, coefficient_array, readonly_array
from app.models.filter import CoeffDomain, DesignSpec


class BasisFamily(str, enum.Enum):
    COSINE = "cosine"            # 1, cos w, ..., cos Mw
    COSINE_SINE = "cosine_sine"  # 1, cos w, sin w, ..., cos Mw, sin Mw


class BasisKind(FrozenModel):
    family: BasisFamily
    m: int

    @model_validator(mode="after")
    def _check_m(self) -> "BasisKind":
        if self.m < 0:
            raise InvalidInputError(f"basis size must be nonnegative, got {self.m}")
        return self

    @classmethod
    def cosine(cls, m: int) -> "BasisKind":
        return cls(family=BasisFamily.COSINE, m=m)

    @classmethod
    def cosine_sine(cls, m: int) -> "BasisKind":
        return cls(family=BasisFamily.COSINE_SINE, m=m)

    @classmethod
    def for_spec(cls, spec: DesignSpec) -> "BasisKind":
        if spec.coeff_domain == CoeffDomain.COMPLEX:
            return cls.cosine_sine(spec.order)
        return cls.cosine(spec.order)

    @property
    def is_complex(self) -> bool:
        return self.family == BasisFamily.COSINE_SINE

    @property
    def dimension(self) -> int:
        return 2 * self.m + 1 if self.is_complex else self.m + 1

    @property
    def reference_count(self) -> int:
        return self.dimension + 1

    @property
    def domain(self) -> CoeffDomain:
        return CoeffDomain.COMPLEX if self.is_complex else CoeffDomain.REAL


class ZeroPhaseDesign(FrozenModel):
    """Converged minimax zero-phase response G.

    ``one_sided`` holds c[0..M] with G(w) = c[0] + 2 sum Re(c[n] e^{-jnw});
    c[0] is real, and for the cosine basis every c[n] is real.
    """

    one_sided: np.ndarray
    basis: BasisKind
    applied_weight: float
    delta_p: float
    extremal_freqs: np.ndarray = np.empty(0)
    iterations: int = 0
    delta_history: Tuple[float, ...] = ()

    @field_validator("one_sided", mode="before")
    @classmethod
    def _coerce_coeffs(cls, value: Any) -> np.ndarray:
        return coefficient_array(value)

    @field_validator("extremal_freqs", mode="before")
    @classmethod
    def _coerce_freqs(cls, value: Any) -> np.ndarray:
        return readonly_array(value, dtype=np.float64)

    @model_validator(mode="after")
    def _check_design(self) -> "ZeroPhaseDesign":
        if self.one_sided.size != self.basis.m + 1:
            raise InvalidInputError(
                f"expected {self.basis.m + 1} one-sided coefficients, got {self.one_sided.size}")
        if not self.delta_p > 0:
            raise InvalidInputError("delta_p must be positive")
        return self

    @property
    def domain(self) -> CoeffDomain:
        return self.basis.domain


class WeightEvaluation(FrozenModel):
    k: float
    delta_p_res: float
    delta_p_target: float

    @property
    def residual(self) -> float:
        return self.delta_p_res - self.delta_p_target


class WeightSolution(FrozenModel):
    k_star: float
    design: ZeroPhaseDesign
    delta_p_target: float
    delta_s_target: float
    k_lower_bound: float
    history: Tuple[WeightEvaluation, ...] = ()

    @property
    def residual(self) -> float:
        return self.design.delta_p - self.delta_p_target


class KSweepPoint(FrozenModel):
    k: float
    delta_p_res: float
    delta_p_target: float
    delta_s_target: float

    @property
    def residual(self) -> float:
        return self.delta_p_res - self.delta_p_target


class KSweep(FrozenModel):
    points: Tuple[KSweepPoint, ...]

    @property
    def crossings(self) -> Optional[Tuple[Tuple[float, float], ...]]:
        """Consecutive K pairs across which the residual changes sign; None for a single point."""
        if len(self.points) < 2:
            return None
        found = []
        for left, right in zip(self.points, self.points[1:]):
            if np.sign(left.residual) != np.sign(right.residual):
                found.append((left.k, right.k))
        return tuple(found)


class AutocorrSequence(FrozenModel):
    """One-sided autocorrelation p[0..N] with p[-m] = conj(p[m])."""

    one_sided: np.ndarray
    domain: CoeffDomain
    lift_a: Optional[float] = None
    lift_b: Optional[float] = None

    @field_validator("one_sided", mode="before")
    @classmethod
    def _coerce_coeffs(cls, value: Any) -> np.ndarray:
        arr = coefficient_array(value)
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("autocorrelation values must be finite")
        return arr

    @model_validator(mode="after")
    def _check_p0(self) -> "AutocorrSequence":
        p0 = self.one_sided[0]
        if abs(np.imag(p0)) > 1e-12 * max(abs(p0), 1.0):
            raise InvalidInputError("p[0] must be real")
        return self

    @property
    def order(self) -> int:
        return self.one_sided.size - 1

    @property
    def p0(self) -> float:
        return float(np.real(self.one_sided[0]))

    def two_sided(self) -> np.ndarray:
        """p[-N..N]."""
        tail = self.one_sided[1:]
        return np.concatenate([np.conj(tail[::-1]), [self.one_sided[0]], tail])


class ConstraintReport(FrozenModel):
    """Checks of a lifted autocorrelation against the three design constraints."""

    passband_max: float       # sqrt(max P) - 1 over the passbands
    passband_min: float       # 1 - sqrt(min P) over the passbands
    delta_p: float
    delta_s: float
    ratio: float
    min_power: float
    min_power_freq: float     # units of pi
    symmetric_ok: bool
    nonnegative_ok: bool
    ratio_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.symmetric_ok and self.nonnegative_ok and self.ratio_ok
