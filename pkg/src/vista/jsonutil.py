"""Canonical JSON: sorted keys, compact separators, UTF-8 text.

Payload builders round durations to 3 decimals before this layer, so equal
payloads always serialize to equal bytes.
"""

from __future__ import annotations

import json
from typing import Any


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_json_bytes(payload: Any) -> bytes:
    return canonical_json(payload).encode("utf-8")
