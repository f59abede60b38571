import logging
import time
from functools import wraps
from typing import Any, Callable, Dict, TypeVar, cast

from fastapi import Response, status
from fastapi.encoders import jsonable_encoder
from fastapi.responses import JSONResponse

T = TypeVar("T", bound=Callable[..., Any])

logger = logging.getLogger(__name__)


def create_response(
    data: Any = None,
    message: str = "Request successful",
    status_code: int = status.HTTP_200_OK,
    success: bool = True
) -> Dict[str, Any]:
    """Standard envelope: status_code, status, message and data."""
    return {
        "status_code": status_code,
        "status": success,
        "message": message,
        "data": data
    }


def standardize_response(message: str = "Request successful") -> Callable[[T], T]:
    """
    Wrap an endpoint's return value in the standard envelope.

    Endpoints return plain pydantic models or dicts; anything that is
    already a Response passes through untouched.

    Args:
        message: Human-readable message placed in the envelope

    Returns:
        The decorator
    """
    def decorator(func: T) -> T:
        @wraps(func)
        async def wrapper(*args, **kwargs) -> Response:
            started = time.perf_counter()
            result = await func(*args, **kwargs)
            logger.debug("%s handled in %.3fs", func.__name__, time.perf_counter() - started)
            if isinstance(result, Response):
                return result
            return JSONResponse(
                content=create_response(data=jsonable_encoder(result), message=message),
                status_code=status.HTTP_200_OK,
            )
        return cast(T, wrapper)
    return decorator
