from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.factor import FactorMethod
from app.models.filter import Band, BandSpec, CoeffDomain, DesignSpec, PhaseSelection
from app.models.result import DesignOptions, WeightMethod


class BandEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: float = Field(..., description="Lower edge in units of pi")
    hi: float = Field(..., description="Upper edge in units of pi")
    kind: Literal["pass", "stop"]


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weight: Optional[float] = Field(None, gt=0)
    psd_eps: Optional[float] = Field(None, ge=0)
    constraint: Optional[float] = Field(None, gt=0)
    alternation: Optional[float] = Field(None, gt=0)
    ratio: Optional[float] = Field(None, gt=0)


class SpecFile(BaseModel):
    """Design request as read from a JSON spec file or an API body."""

    model_config = ConfigDict(extra="forbid")

    order: int
    bands: List[BandEntry]
    k_des: float
    domain: CoeffDomain = CoeffDomain.REAL
    phase: str = "min"
    factorization: FactorMethod = FactorMethod.AUTO
    weight_method: Optional[WeightMethod] = None
    grid_density: Optional[int] = Field(None, ge=4)
    cepstral_fft_len: Optional[int] = Field(None, ge=4)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    def to_design_spec(self) -> DesignSpec:
        bands = sorted(
            (Band(lo=b.lo, hi=b.hi, desired=1.0 if b.kind == "pass" else 0.0) for b in self.bands),
            key=lambda b: b.lo,
        )
        return DesignSpec(
            order=self.order,
            bands=BandSpec(bands=tuple(bands)),
            k_des=self.k_des,
            coeff_domain=self.domain,
        )

    def phase_selection(self) -> PhaseSelection:
        return PhaseSelection.parse(self.phase)

    def to_options(self) -> DesignOptions:
        overrides = {
            "factorization": self.factorization,
            "weight_method": self.weight_method,
            "grid_density": self.grid_density,
            "cepstral_fft_len": self.cepstral_fft_len,
            "weight_tol": self.tolerances.weight,
            "psd_eps": self.tolerances.psd_eps,
            "constraint_tol": self.tolerances.constraint,
            "alternation_rtol": self.tolerances.alternation,
            "ratio_tol": self.tolerances.ratio,
        }
        return DesignOptions(**{key: value for key, value in overrides.items() if value is not None})
