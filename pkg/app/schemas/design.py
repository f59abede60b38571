import math
from typing import Dict, Generic, List, Optional, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, Field

from app.models.certificate import Certificate
from app.models.design import KSweep
from app.models.filter import CoeffDomain, FirFilter
from app.models.result import DesignResult
from app.schemas.spec_file import SpecFile

T = TypeVar("T")


class Envelope(BaseModel, Generic[T]):
    """Standard response format: status_code, status, message and data."""

    status_code: int = Field(200, description="HTTP status code")
    status: bool = Field(True, description="Success status")
    message: str = Field("Request successful", description="Response message")
    data: Optional[T] = Field(None, description="Response data")


class Coefficients(BaseModel):
    real: List[float]
    imag: Optional[List[float]] = None

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Coefficients":
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return cls(real=values.real.tolist(), imag=values.imag.tolist())
        return cls(real=values.tolist())

    def to_filter(self, domain: Optional[CoeffDomain] = None) -> FirFilter:
        taps = np.asarray(self.real, dtype=float)
        if self.imag is not None:
            taps = taps + 1j * np.asarray(self.imag, dtype=float)
        return FirFilter(coeffs=taps, domain=domain)


class CertificateOut(BaseModel):
    alternations_found: int
    alternations_required: int
    optimal: bool
    ratio_ok: bool
    source: str
    delta_p: float
    delta_s: float
    passband_deviation: float
    stopband_peak: float
    ratio: Optional[float] = None
    alternation_freqs: List[float]

    @classmethod
    def from_certificate(cls, cert: Certificate) -> "CertificateOut":
        ratio = cert.deviations.ratio
        return cls(
            alternations_found=cert.alternations_found,
            alternations_required=cert.alternations_required,
            optimal=cert.optimal,
            ratio_ok=cert.ratio_ok,
            source=cert.source.value,
            delta_p=cert.deviations.delta_p,
            delta_s=cert.deviations.delta_s,
            passband_deviation=cert.deviations.passband_deviation,
            stopband_peak=cert.deviations.stopband_peak,
            ratio=ratio if math.isfinite(ratio) else None,
            alternation_freqs=list(cert.alternation_freqs),
        )


class DesignSummary(BaseModel):
    order: int
    domain: CoeffDomain
    phase: str
    method: str
    k_star: float
    k_lower_bound: float
    delta_p_autocorr: float
    delta_p: float
    delta_s: float
    lift_a: float
    lift_b: float
    factorization_residual: float
    certificate: CertificateOut
    filter: Coefficients
    autocorr: Coefficients
    timings: Dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_result(cls, result: DesignResult) -> "DesignSummary":
        return cls(
            order=result.filter.order,
            domain=result.filter.domain,
            phase=result.filter.phase or "",
            method=result.method.value,
            k_star=result.weight.k_star,
            k_lower_bound=result.weight.k_lower_bound,
            delta_p_autocorr=result.weight.design.delta_p,
            delta_p=result.certificate.deviations.delta_p,
            delta_s=result.certificate.deviations.delta_s,
            lift_a=result.autocorr.lift_a,
            lift_b=result.autocorr.lift_b,
            factorization_residual=result.factorization.relative_residual,
            certificate=CertificateOut.from_certificate(result.certificate),
            filter=Coefficients.from_array(result.filter.coeffs),
            autocorr=Coefficients.from_array(result.autocorr.one_sided),
            timings=dict(result.timings),
        )


class CertifyRequest(BaseModel):
    spec: SpecFile
    coefficients: Coefficients


class ResponseRequest(BaseModel):
    coefficients: Coefficients
    points: int = Field(512, ge=2, le=1 << 16)
    lo: float = Field(0.0, ge=-1.0, le=1.0, description="Lowest frequency in units of pi")
    hi: float = Field(1.0, ge=-1.0, le=1.0, description="Highest frequency in units of pi")


class ResponseOut(BaseModel):
    freq_pi: List[float]
    magnitude: List[float]
    magnitude_db: List[Optional[float]]
    group_delay: List[Optional[float]]


class KSweepRequest(BaseModel):
    spec: SpecFile
    k_min: float = Field(..., gt=0)
    k_max: float = Field(..., gt=0)
    count: int = Field(20, ge=1, le=200)


class KSweepRow(BaseModel):
    k: float
    delta_p_res: float
    delta_p_target: float
    delta_s_target: float


class KSweepOut(BaseModel):
    points: List[KSweepRow]
    crossings: Optional[List[Tuple[float, float]]] = None
    single_crossing: Optional[bool] = None

    @classmethod
    def from_sweep(cls, sweep: KSweep) -> "KSweepOut":
        crossings = sweep.crossings
        return cls(
            points=[KSweepRow(k=p.k, delta_p_res=p.delta_p_res, delta_p_target=p.delta_p_target,
                              delta_s_target=p.delta_s_target) for p in sweep.points],
            crossings=None if crossings is None else [list(c) for c in crossings],
            single_crossing=None if crossings is None else len(crossings) == 1,
        )
