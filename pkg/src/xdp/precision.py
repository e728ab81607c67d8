"""Global working-precision policy.

All numeric operations in the package compute under an explicit binary
precision (mantissa bits). The default is 256 bits and can be changed
globally; individual operations accept a ``bits`` override. Computations
always run inside ``mp.workprec`` so the ambient mpmath state of the caller
is never disturbed and results do not depend on it.
"""

from mpmath import mp

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64

_default_bits = DEFAULT_PRECISION_BITS


def set_default_precision(bits: int) -> None:
    global _default_bits
    bits = int(bits)
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    _default_bits = bits


def get_default_precision() -> int:
    return _default_bits


def resolve_bits(bits=None) -> int:
    if bits is None:
        return _default_bits
    bits = int(bits)
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    return bits


def working(bits=None):
    """Context manager: run at the resolved precision."""
    return mp.workprec(resolve_bits(bits))


def decimal_digits(bits: int) -> int:
    """Decimal digits that guarantee exact round-trip of a bits-mantissa float."""
    # ceil(bits * log10(2)) + 2 guard digits
    return int(bits * 0.3010299957) + 3
