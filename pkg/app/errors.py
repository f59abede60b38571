from enum import Enum
from fastapi import Request, status
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException
from typing import Any, Dict, Optional

class ErrorCode(str, Enum):
    # Validation errors
    VAL_001 = "VAL_001"  # Invalid input
    VAL_002 = "VAL_002"  # Malformed spec or coefficient file
    VAL_003 = "VAL_003"  # Dimension mismatch

    # Solver errors
    SOL_001 = "SOL_001"  # Exchange iteration did not converge
    SOL_002 = "SOL_002"  # Ill-conditioned reference system
    SOL_003 = "SOL_003"  # Weight bracket not found
    SOL_004 = "SOL_004"  # Spectral factorization failed
    SOL_005 = "SOL_005"  # Lifted spectrum is not nonnegative

    # Server errors
    SRV_001 = "SRV_001"  # Internal server error
    SRV_002 = "SRV_002"  # Design failed its own certificate


class FilterDesignError(Exception):
    """Base error for every failure raised by the design toolkit."""

    error_code: ErrorCode = ErrorCode.SRV_001

    def __init__(self, message: str, error_code: Optional[ErrorCode] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        if error_code is not None:
            self.error_code = error_code
        self.details = details or {}

    @property
    def is_input_error(self) -> bool:
        return self.error_code.value.startswith("VAL")

    def to_dict(self) -> Dict[str, Any]:
        return create_error_response(
            status_code=http_status_for(self),
            message=self.message,
            error_code=self.error_code,
            details=self.details,
        )


class InvalidInputError(FilterDesignError):
    error_code = ErrorCode.VAL_001


class SpecParseError(FilterDesignError):
    error_code = ErrorCode.VAL_002


class DimensionMismatchError(FilterDesignError):
    error_code = ErrorCode.VAL_003


class ConvergenceError(FilterDesignError):
    error_code = ErrorCode.SOL_001


class IllConditionedError(FilterDesignError):
    error_code = ErrorCode.SOL_002


class InfeasibleError(FilterDesignError):
    error_code = ErrorCode.SOL_003


class FactorizationError(FilterDesignError):
    error_code = ErrorCode.SOL_004


class NegativeSpectrumError(FilterDesignError):
    error_code = ErrorCode.SOL_005


class InternalConsistencyError(FilterDesignError):
    error_code = ErrorCode.SRV_002


class StageError(FilterDesignError):
    """A pipeline stage failed; carries the stage name and the underlying error."""

    def __init__(self, stage: str, cause: FilterDesignError):
        super().__init__(
            f"{stage} stage failed: {cause.message}",
            error_code=cause.error_code,
            details={"stage": stage, **cause.details},
        )
        self.stage = stage
        self.cause = cause

    @property
    def is_input_error(self) -> bool:
        return self.cause.is_input_error


def http_status_for(exc: FilterDesignError) -> int:
    family = exc.error_code.value.split("_")[0]
    if family == "VAL":
        return status.HTTP_422_UNPROCESSABLE_ENTITY
    if family == "SOL":
        return status.HTTP_409_CONFLICT
    return status.HTTP_500_INTERNAL_SERVER_ERROR


def create_error_response(
    status_code: int,
    message: str,
    error_code: ErrorCode,
    details: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """Create a standardized error response"""
    return {
        "message": message,
        "error_code": error_code,
        "details": details or {}
    }

async def http_exception_handler(request: Request, exc: StarletteHTTPException) -> JSONResponse:
    """Handle HTTP exceptions"""
    if isinstance(exc.detail, dict) and "message" in exc.detail and "error_code" in exc.detail:
        error_data = {
            "error_code": exc.detail["error_code"],
            "details": exc.detail.get("details", {})
        }
        message = exc.detail.get("message", "An error occurred")
    else:
        error_data = {
            "error_code": getattr(exc, "error_code", ErrorCode.SRV_001),
            "details": getattr(exc, "details", {})
        }
        message = str(exc.detail)

    return JSONResponse(
        status_code=exc.status_code,
        content={
            "status_code": exc.status_code,
            "status": False,
            "message": message,
            "data": error_data
        }
    )

async def validation_exception_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
    """Handle request body validation exceptions"""
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={
            "status_code": status.HTTP_422_UNPROCESSABLE_ENTITY,
            "status": False,
            "message": "Validation error",
            "data": {
                "error_code": ErrorCode.VAL_001,
                "details": {"errors": exc.errors()}
            }
        }
    )

async def filter_design_exception_handler(request: Request, exc: FilterDesignError) -> JSONResponse:
    """Map toolkit errors onto the standard envelope"""
    status_code = http_status_for(exc)
    return JSONResponse(
        status_code=status_code,
        content={
            "status_code": status_code,
            "status": False,
            "message": exc.message,
            "data": {
                "error_code": exc.error_code,
                "details": exc.details
            }
        }
    )
