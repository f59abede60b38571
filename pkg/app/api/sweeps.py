from typing import Any

import numpy as np
from fastapi import APIRouter, HTTPException
from starlette.concurrency import run_in_threadpool

from app.errors import FilterDesignError, InvalidInputError, http_status_for
from app.schemas.design import Envelope, KSweepOut, KSweepRequest
from app.services.weight_solver import k_sweep
from app.utils.decorators import standardize_response

router = APIRouter()


@router.post("", response_model=Envelope[KSweepOut])
@standardize_response("Weight sweep computed")
async def create_sweep(request: KSweepRequest) -> Any:
    """
    Tabulate the attained and target passband deviation over log-spaced weights
    """
    try:
        if request.k_max < request.k_min:
            raise InvalidInputError("k_max must not be below k_min",
                                    details={"k_min": request.k_min, "k_max": request.k_max})
        spec = request.spec.to_design_spec()
        ks = np.geomspace(request.k_min, request.k_max, request.count)
        sweep = await run_in_threadpool(k_sweep, spec, ks, density=request.spec.grid_density)
    except FilterDesignError as e:
        raise HTTPException(status_code=http_status_for(e), detail=e.to_dict())
    return KSweepOut.from_sweep(sweep)
