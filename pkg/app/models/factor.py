import enum
from typing import List, Optional, Tuple

import numpy as np

from app.models.base import FrozenModel


class FactorMethod(str, enum.Enum):
    AUTO = "auto"
    ROOTS = "roots"
    CEPSTRAL = "cepstral"


class ZeroPair(FrozenModel):
    """Two zeros of P related by z -> 1/conj(z).

    Off-circle pairs keep one member inside and one outside the unit circle.
    On-circle pairs are a double zero; ``inner`` and ``outer`` both hold its
    location projected onto the circle.
    """

    inner: complex
    outer: complex
    on_circle: bool = False

    @property
    def location(self) -> complex:
        return self.inner


class ZeroSet(FrozenModel):
    """All 2N zeros of z^N P(z), grouped into reciprocal pairs."""

    pairs: Tuple[ZeroPair, ...]
    order: int
    p0: float

    @property
    def off_circle(self) -> Tuple[ZeroPair, ...]:
        return tuple(p for p in self.pairs if not p.on_circle)

    @property
    def on_circle(self) -> Tuple[ZeroPair, ...]:
        return tuple(p for p in self.pairs if p.on_circle)

    def zeros(self) -> np.ndarray:
        found: List[complex] = []
        for pair in self.pairs:
            found.extend([pair.inner, pair.outer])
        return np.asarray(found, dtype=np.complex128)

    def rows(self) -> List[Tuple[complex, int]]:
        """(zero, multiplicity) listing; on-circle pairs appear once with multiplicity 2."""
        listing: List[Tuple[complex, int]] = []
        for pair in self.pairs:
            if pair.on_circle:
                listing.append((pair.location, 2))
            else:
                listing.append((pair.inner, 1))
                listing.append((pair.outer, 1))
        return listing


class FactorizationReport(FrozenModel):
    residual: float
    relative_residual: float
    within_tol: bool
    phase_ok: Optional[bool] = None
    min_zero_modulus: Optional[float] = None
    max_zero_modulus: Optional[float] = None
