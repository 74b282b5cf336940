"""Angles as rational multiples of pi: formatting and parsing."""
import re
from fractions import Fraction

import numpy as np

from .errors import ValidationError

MAX_DENOMINATOR = 64
_PI_RE = re.compile(r"^\s*([+-]?)\s*(\d*)\s*\*?\s*(?:pi|π)\s*(?:/\s*(\d+))?\s*$", re.IGNORECASE)


def pi_fraction(x: float, tol: float = 1e-9):
    """Fraction f with x = f*pi, or None if x is not a small rational multiple of pi."""
    f = Fraction(float(x) / np.pi).limit_denominator(MAX_DENOMINATOR)
    if abs(float(f) * np.pi - x) <= tol:
        return f
    return None


def format_angle(x: float) -> str:
    """'-9π/8', 'π/2', '0', or a decimal when not a rational multiple of pi."""
    f = pi_fraction(x)
    if f is None:
        return f"{x:.10g}"
    if f == 0:
        return "0"
    sign = "-" if f < 0 else ""
    num, den = abs(f.numerator), f.denominator
    head = "π" if num == 1 else f"{num}π"
    return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"


def parse_angle(text) -> float:
    """Accept decimals or forms like 'pi/2', '-9pi/8', '3*pi/4', '-π'."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    m = _PI_RE.match(s)
    if m:
        sign, num, den = m.groups()
        val = (int(num) if num else 1) * np.pi / (int(den) if den else 1)
        return -val if sign == "-" else val
    try:
        return float(s)
    except ValueError:
        raise ValidationError(f"cannot parse angle {text!r}") from None
