"""JSON encoding of extended reals: infinities travel as the strings "inf" / "-inf"."""

import math

from .errors import ParseError

_SENTINELS = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf}


def encode_real(value):
    if value is None:
        return None
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return None
    return value


def decode_real(value, where=""):
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value.strip().lower() in _SENTINELS:
        return _SENTINELS[value.strip().lower()]
    raise ParseError(f"{where}: expected a number or 'inf'/'-inf', got {value!r}")
