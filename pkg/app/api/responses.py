import math
from typing import Any, List, Optional

import numpy as np
from fastapi import APIRouter, HTTPException, status

from app.errors import ErrorCode, FilterDesignError, create_error_response, http_status_for
from app.schemas.design import Envelope, ResponseOut, ResponseRequest
from app.services.spectrum import response_table
from app.utils.decorators import standardize_response

router = APIRouter()


def _nullable(values: np.ndarray) -> List[Optional[float]]:
    return [None if math.isnan(v) else float(v) for v in values]


@router.post("", response_model=Envelope[ResponseOut])
@standardize_response("Frequency response computed")
async def create_response_table(request: ResponseRequest) -> Any:
    """
    Magnitude and group delay of the given coefficients on a uniform grid
    """
    if request.lo >= request.hi:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=create_error_response(
                status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                message="lo must be below hi",
                error_code=ErrorCode.VAL_001
            )
        )
    try:
        h = request.coefficients.to_filter()
        omegas = np.linspace(request.lo, request.hi, request.points) * math.pi
        freq, mag, db, delay = response_table(h, omegas)
    except FilterDesignError as e:
        raise HTTPException(status_code=http_status_for(e), detail=e.to_dict())
    return ResponseOut(
        freq_pi=freq.tolist(),
        magnitude=mag.tolist(),
        magnitude_db=_nullable(db),
        group_delay=_nullable(delay),
    )
