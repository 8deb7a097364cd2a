"""Encoding helpers."""

import base64
import hashlib
import json
from typing import Any


def bytes_to_b64(val: bytes, pad: bool = False, encoding: str = "ascii") -> str:
    """Convert a byte string to urlsafe base 64."""
    b64 = base64.urlsafe_b64encode(val).decode(encoding)
    return b64 if pad else b64.rstrip("=")


def canonical_json(val: Any, indent=None) -> str:
    """Serialize a value with sorted keys so equal values give equal text."""
    if indent is None:
        return json.dumps(val, sort_keys=True, separators=(",", ":"))
    return json.dumps(val, sort_keys=True, indent=indent)


def content_hash(val: Any) -> str:
    """Return an unpadded urlsafe digest of the canonical JSON of a value."""
    digest = hashlib.sha256(canonical_json(val).encode("utf-8")).digest()
    return bytes_to_b64(digest)
