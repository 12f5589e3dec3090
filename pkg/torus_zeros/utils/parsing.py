import logging
import re

from torus_zeros.exceptions.validation import InvalidFormatException, InvalidRangeException
from torus_zeros.models.moduli import ExtendedScalar, Rectangle

logger = logging.getLogger(__name__)

COMPLEX_FORMAT = "a+bi, e.g. 0.3+1.2i, 2i, -1"


def parse_complex(text: str, field: str = "value") -> complex:
    """
    Parse "a+bi" strings.

    Accepts "a", "bi", "a+bi", "a-bi", "i", "-i" with optional exponents; the
    imaginary unit may be written i or j.
    """
    if text is None:
        raise InvalidFormatException(field=field, expected_format=COMPLEX_FORMAT)
    cleaned = str(text).strip().replace(" ", "").replace("j", "i")
    if not cleaned:
        raise InvalidFormatException(field=field, expected_format=COMPLEX_FORMAT, provided_value=text)

    candidate = cleaned.replace("i", "j")
    if candidate.endswith("j") and (len(candidate) == 1 or candidate[-2] in "+-"):
        candidate = candidate[:-1] + "1j"
    try:
        return complex(candidate)
    except ValueError as e:
        raise InvalidFormatException(
            field=field,
            expected_format=COMPLEX_FORMAT,
            provided_value=text,
            original_exception=str(e),
        ) from e


def parse_extended(text: str, field: str = "C") -> ExtendedScalar:
    """Parse a complex number or the literal 'inf'."""
    if text is not None and str(text).strip().lower() in ("inf", "infinity", "oo"):
        return ExtendedScalar.infinity()
    return ExtendedScalar.finite(parse_complex(text, field=field))


def format_complex(value: complex) -> str:
    value = complex(value)
    return f"{value.real!r}{value.imag:+}i"


def parse_region(text: str, field: str = "region") -> Rectangle:
    """Parse 're_min:re_max:im_min:im_max'."""
    parts = str(text).split(":") if text is not None else []
    if len(parts) != 4:
        raise InvalidFormatException(
            field=field,
            expected_format="re_min:re_max:im_min:im_max",
            provided_value=text,
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise InvalidFormatException(
            field=field,
            expected_format="re_min:re_max:im_min:im_max",
            provided_value=text,
        ) from e
    return Rectangle(*values)


def parse_grid(text: str, field: str = "grid") -> tuple[int, int]:
    """Parse 'NXxNY' (or a single N for a square grid)."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:[xX*]\s*(\d+))?\s*", str(text or ""))
    if not match:
        raise InvalidFormatException(field=field, expected_format="NXxNY, e.g. 400x400", provided_value=text)
    nx = int(match.group(1))
    ny = int(match.group(2) or match.group(1))
    if nx < 16 or ny < 16:
        raise InvalidRangeException(field=field, value=f"{nx}x{ny}", min_value=16)
    return nx, ny
