"""Deterministic text rendering of numbers for command output."""

import math

SIG_DIGITS = 12


def format_number(v) -> str:
    """12 significant digits; integral values keep a trailing '.0'; infinities print as 'inf'."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0.0"
    s = f"{v:.{SIG_DIGITS}g}"
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def round_sig(v) -> float:
    """The float whose text form is ``format_number(v)``; used for JSON payloads."""
    v = float(v)
    if v == 0:
        return 0.0
    return v if not math.isfinite(v) else float(f"{v:.{SIG_DIGITS}g}")
