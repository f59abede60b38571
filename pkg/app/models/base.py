from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """Immutable value type that may carry numpy arrays."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def readonly_array(value: Any, dtype: Any = None) -> np.ndarray:
    """Copy ``value`` into a contiguous 1-D array and lock it against writes."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr = np.atleast_1d(arr)
    arr.setflags(write=False)
    return arr


def coefficient_array(value: Any) -> np.ndarray:
    """Keep real data real and complex data complex."""
    arr = np.asarray(value)
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    return readonly_array(arr, dtype=dtype)
