import enum
import math
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from app.errors import DimensionMismatchError, InvalidInputError
from app.models.base import FrozenModel, coefficient_array, readonly_array

# Half-width (in units of pi) used when deciding whether a frequency sits on a band edge.
EDGE_SLACK = 1e-12


class CoeffDomain(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


class Band(FrozenModel):
    lo: float  # units of pi
    hi: float
    desired: float  # 1.0 passband, 0.0 stopband

    @property
    def is_passband(self) -> bool:
        return self.desired == 1.0

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def radians(self) -> Tuple[float, float]:
        return self.lo * math.pi, self.hi * math.pi


class BandSpec(FrozenModel):
    """Ordered, disjoint frequency intervals with their ideal magnitude."""

    bands: Tuple[Band, ...]

    @model_validator(mode="after")
    def _check_bands(self) -> "BandSpec":
        if not self.bands:
            raise InvalidInputError("band specification is empty")
        for i, band in enumerate(self.bands):
            if not (math.isfinite(band.lo) and math.isfinite(band.hi)):
                raise InvalidInputError("band edges must be finite", details={"band": i})
            if band.lo > band.hi:
                raise InvalidInputError(
                    f"band {i} has lo > hi ({band.lo} > {band.hi})",
                    details={"band": i, "lo": band.lo, "hi": band.hi},
                )
            if band.desired not in (0.0, 1.0):
                raise InvalidInputError(
                    f"band {i} desired value must be 0 or 1, got {band.desired}",
                    details={"band": i},
                )
            if band.lo < -1.0 or band.hi > 1.0:
                raise InvalidInputError(
                    f"band {i} lies outside [-1, 1] (units of pi)",
                    details={"band": i, "lo": band.lo, "hi": band.hi},
                )
        for i, (left, right) in enumerate(zip(self.bands, self.bands[1:])):
            if left.hi >= right.lo:
                raise InvalidInputError(
                    f"bands {i} and {i + 1} overlap or are out of order",
                    details={"bands": [i, i + 1]},
                )
        if not any(b.is_passband for b in self.bands):
            raise InvalidInputError("band specification has no passband")
        if all(b.is_passband for b in self.bands):
            raise InvalidInputError("band specification has no stopband")
        return self

    @classmethod
    def from_edges(cls, passbands: Sequence[Sequence[float]],
                   stopbands: Sequence[Sequence[float]]) -> "BandSpec":
        """Build a spec from (lo, hi) pairs in units of pi."""
        bands = [Band(lo=lo, hi=hi, desired=1.0) for lo, hi in passbands]
        bands += [Band(lo=lo, hi=hi, desired=0.0) for lo, hi in stopbands]
        bands.sort(key=lambda b: b.lo)
        return cls(bands=tuple(bands))

    @property
    def passbands(self) -> Tuple[Band, ...]:
        return tuple(b for b in self.bands if b.is_passband)

    @property
    def stopbands(self) -> Tuple[Band, ...]:
        return tuple(b for b in self.bands if not b.is_passband)

    @property
    def lowest(self) -> float:
        return self.bands[0].lo

    def locate(self, omegas: Any) -> np.ndarray:
        """Band index for each frequency in radians, -1 where no band contains it."""
        x = np.atleast_1d(np.asarray(omegas, dtype=float)) / math.pi
        index = np.full(x.shape, -1, dtype=int)
        for i, band in enumerate(self.bands):
            inside = (x >= band.lo - EDGE_SLACK) & (x <= band.hi + EDGE_SLACK)
            index[inside & (index < 0)] = i
        return index

    def is_passband_at(self, omegas: Any) -> np.ndarray:
        index = self.locate(omegas)
        if np.any(index < 0):
            raise InvalidInputError("frequency lies outside every band",
                                    details={"omegas_pi": (np.atleast_1d(omegas)[index < 0] / math.pi).tolist()})
        flags = np.array([b.is_passband for b in self.bands])
        return flags[index]


class DesignSpec(FrozenModel):
    order: int = Field(..., description="Filter order N; the filter has N+1 taps")
    bands: BandSpec
    k_des: float = Field(..., description="Required ratio of passband to stopband deviation")
    coeff_domain: CoeffDomain = CoeffDomain.REAL

    @model_validator(mode="after")
    def _check_spec(self) -> "DesignSpec":
        if self.order < 0:
            raise InvalidInputError(f"filter order must be non-negative, got {self.order}",
                                    details={"order": self.order})
        if not (math.isfinite(self.k_des) and self.k_des > 0):
            raise InvalidInputError(f"k_des must be positive and finite, got {self.k_des}",
                                    details={"k_des": self.k_des})
        if self.coeff_domain == CoeffDomain.REAL and self.bands.lowest < 0:
            raise InvalidInputError("real-coefficient specs must lie within [0, 1] (units of pi)",
                                    details={"lowest_edge": self.bands.lowest})
        if self.coeff_domain == CoeffDomain.COMPLEX and self.bands.lowest <= -1:
            raise InvalidInputError("complex-coefficient specs must lie within (-1, 1] (units of pi)",
                                    details={"lowest_edge": self.bands.lowest})
        return self

    @property
    def is_complex(self) -> bool:
        return self.coeff_domain == CoeffDomain.COMPLEX

    def with_order(self, order: int) -> "DesignSpec":
        return self.model_copy(update={"order": order})


class FirFilter(FrozenModel):
    """Tap sequence h[0..N]; ``phase`` records how the taps were obtained."""

    coeffs: np.ndarray
    domain: CoeffDomain
    phase: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        arr = coefficient_array(data.get("coeffs", ()))
        if arr.size == 0:
            raise InvalidInputError("a filter needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("filter coefficients must be finite")
        domain = data.get("domain")
        if domain is None:
            domain = CoeffDomain.COMPLEX if np.iscomplexobj(arr) else CoeffDomain.REAL
        domain = CoeffDomain(domain)
        if domain == CoeffDomain.REAL and np.iscomplexobj(arr):
            scale = float(np.max(np.abs(arr)))
            if np.max(np.abs(arr.imag)) > 1e-12 * max(scale, 1.0):
                raise DimensionMismatchError("complex coefficients given for a real-domain filter")
            arr = readonly_array(arr.real, dtype=np.float64)
        data["coeffs"] = arr
        data["domain"] = domain
        return data

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_complex(self) -> bool:
        return self.domain == CoeffDomain.COMPLEX


class FrequencyGrid(FrozenModel):
    """Sorted sample frequencies (radians) with the band each one belongs to."""

    omegas: np.ndarray
    band_index: np.ndarray
    in_passband: np.ndarray

    @field_validator("omegas", mode="before")
    @classmethod
    def _coerce_omegas(cls, value: Any) -> np.ndarray:
        return readonly_array(value, dtype=np.float64)

    @field_validator("band_index", mode="before")
    @classmethod
    def _coerce_index(cls, value: Any) -> np.ndarray:
        return readonly_array(value, dtype=int)

    @field_validator("in_passband", mode="before")
    @classmethod
    def _coerce_flags(cls, value: Any) -> np.ndarray:
        return readonly_array(value, dtype=bool)

    @model_validator(mode="after")
    def _check_shapes(self) -> "FrequencyGrid":
        if not (self.omegas.shape == self.band_index.shape == self.in_passband.shape):
            raise DimensionMismatchError("grid arrays must have matching lengths")
        if self.omegas.size and np.any(np.diff(self.omegas) < 0):
            raise InvalidInputError("grid frequencies must be sorted")
        return self

    @property
    def size(self) -> int:
        return self.omegas.size

    def weights(self, k: float) -> np.ndarray:
        return np.where(self.in_passband, 1.0, k)

    def desired(self) -> np.ndarray:
        return np.where(self.in_passband, 1.0, 0.0)


class PhaseKind(str, enum.Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    EXPLICIT = "explicit"


class PhaseSelection(FrozenModel):
    """Which member of every off-unit-circle zero pair a factor keeps.

    For ``EXPLICIT`` selections, ``mask[i]`` is True when the outer member
    of the i-th off-circle pair is kept.
    """

    kind: PhaseKind = PhaseKind.MINIMUM
    mask: Tuple[bool, ...] = ()

    @model_validator(mode="after")
    def _check_mask(self) -> "PhaseSelection":
        if self.kind != PhaseKind.EXPLICIT and self.mask:
            raise InvalidInputError("a mask is only meaningful for explicit phase selections")
        return self

    @classmethod
    def minimum(cls) -> "PhaseSelection":
        return cls(kind=PhaseKind.MINIMUM)

    @classmethod
    def maximum(cls) -> "PhaseSelection":
        return cls(kind=PhaseKind.MAXIMUM)

    @classmethod
    def explicit(cls, mask: Sequence[bool]) -> "PhaseSelection":
        return cls(kind=PhaseKind.EXPLICIT, mask=tuple(bool(b) for b in mask))

    @classmethod
    def parse(cls, text: str) -> "PhaseSelection":
        """Accept ``min``, ``max`` or ``explicit:<bits>``, e.g. ``explicit:0110``."""
        value = text.strip().lower()
        if value in ("min", "minimum"):
            return cls.minimum()
        if value in ("max", "maximum"):
            return cls.maximum()
        if value.startswith("explicit:"):
            bits = value.split(":", 1)[1]
            if any(ch not in "01" for ch in bits):
                raise InvalidInputError(f"explicit phase mask must be a bitstring, got {bits!r}")
            return cls.explicit([ch == "1" for ch in bits])
        raise InvalidInputError(f"unknown phase selection {text!r}")

    @property
    def label(self) -> str:
        if self.kind == PhaseKind.EXPLICIT:
            return "explicit:" + "".join("1" if b else "0" for b in self.mask)
        return self.kind.value
