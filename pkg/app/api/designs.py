from typing import Any

from fastapi import APIRouter, HTTPException
from starlette.concurrency import run_in_threadpool

from app.errors import FilterDesignError, http_status_for
from app.schemas.design import CertificateOut, Coefficients, DesignSummary, Envelope
from app.schemas.spec_file import SpecFile
from app.services.pipeline import design_filter, linear_phase_baseline
from app.utils.decorators import standardize_response

router = APIRouter()


@router.post("", response_model=Envelope[DesignSummary])
@standardize_response("Design certified optimal")
async def create_design(spec_file: SpecFile) -> Any:
    """
    Design a minimax nonlinear-phase filter from a spec and return its certificate
    """
    try:
        spec = spec_file.to_design_spec()
        result = await run_in_threadpool(design_filter, spec, spec_file.phase_selection(),
                                         spec_file.to_options())
    except FilterDesignError as e:
        raise HTTPException(status_code=http_status_for(e), detail=e.to_dict())
    return DesignSummary.from_result(result)


@router.post("/linear-phase", response_model=Envelope[dict])
@standardize_response("Linear-phase baseline designed")
async def create_linear_phase_baseline(spec_file: SpecFile) -> Any:
    """
    Symmetric equiripple filter for the same spec, for comparison
    """
    try:
        spec = spec_file.to_design_spec()
        h, certificate = await run_in_threadpool(linear_phase_baseline, spec, spec_file.to_options())
    except FilterDesignError as e:
        raise HTTPException(status_code=http_status_for(e), detail=e.to_dict())
    return {
        "filter": Coefficients.from_array(h.coeffs),
        "certificate": CertificateOut.from_certificate(certificate),
    }
