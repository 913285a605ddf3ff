"""Validation utilities shared by operation entry points and file loaders."""

import logging
from typing import Any, Dict, List, Sequence, Union

from fairsamp.core.errors import WorkbenchError

logger = logging.getLogger(__name__)

class ValidationError(WorkbenchError, ValueError):
    """Raised when an argument or a loaded document fails validation."""
    pass

class Validator:
    """Argument checks used at operation entry points."""

    @staticmethod
    def require_int(value: Any, name: str) -> int:
        """Require an integer (bool rejected)."""
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{name} must be an integer, got {type(value).__name__}")
        return value

    @staticmethod
    def require_positive(value: Union[int, float], name: str) -> Union[int, float]:
        """Require a strictly positive number."""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{name} must be a number, got {type(value).__name__}")
        if value <= 0:
            raise ValidationError(f"{name} must be positive, got {value}")
        return value

    @staticmethod
    def require_non_negative(value: Union[int, float], name: str) -> Union[int, float]:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{name} must be a number, got {type(value).__name__}")
        if value < 0:
            raise ValidationError(f"{name} must be non-negative, got {value}")
        return value

    @staticmethod
    def require_non_empty_list(value: Any, name: str) -> List[Any]:
        """Require value is a non-empty list."""
        if not isinstance(value, (list, tuple)):
            raise ValidationError(f"{name} must be a list, got {type(value).__name__}")
        if len(value) == 0:
            raise ValidationError(f"{name} cannot be empty")
        return list(value)

    @staticmethod
    def require_bitstring(value: Any, n: int, name: str = "bitstring") -> str:
        """Require a qubit-0-first string of '0'/'1' of length n."""
        if not isinstance(value, str):
            raise ValidationError(f"{name} must be a string, got {type(value).__name__}")
        if len(value) != n:
            raise ValidationError(f"{name} must have length {n}, got {len(value)}")
        if any(ch not in "01" for ch in value):
            raise ValidationError(f"{name} may only contain '0' and '1', got {value!r}")
        return value

def require_document(data: Any, required: Sequence[str], optional: Sequence[str] = (),
                     name: str = "document") -> Dict[str, Any]:
    """Require a JSON object holding every key in `required`.

    Keys outside `required` and `optional` are logged and ignored.
    """
    if not isinstance(data, dict):
        raise ValidationError(f"{name} must be a JSON object, got {type(data).__name__}")
    missing = [key for key in required if key not in data]
    if missing:
        raise ValidationError(f"{name} is missing keys: {missing}")
    unknown = sorted(set(data) - set(required) - set(optional))
    if unknown:
        logger.warning(f"{name}: ignoring unrecognised keys {unknown}")
    return data
