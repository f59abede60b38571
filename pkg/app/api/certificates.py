from typing import Any

from fastapi import APIRouter, HTTPException
from starlette.concurrency import run_in_threadpool

from app.errors import FilterDesignError, http_status_for
from app.schemas.design import CertificateOut, CertifyRequest, Envelope
from app.services.certificate import certify
from app.utils.decorators import standardize_response

router = APIRouter()


@router.post("", response_model=Envelope[CertificateOut])
@standardize_response("Certificate computed")
async def create_certificate(request: CertifyRequest) -> Any:
    """
    Certify given coefficients against a spec; a suboptimal filter is still a 200
    """
    try:
        spec = request.spec.to_design_spec()
        h = request.coefficients.to_filter()
        options = request.spec.to_options()
        certificate = await run_in_threadpool(
            certify, h, spec, rel_tol=options.alternation_rtol, ratio_tol=options.ratio_tol
        )
    except FilterDesignError as e:
        raise HTTPException(status_code=http_status_for(e), detail=e.to_dict())
    return CertificateOut.from_certificate(certificate)
