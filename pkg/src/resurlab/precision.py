"""Working-precision configuration shared by every module.

All numerical operations in this package run at a single configurable
binary precision (default 256 bits).  Agreement between two quantities is
measured in bits / significant digits rather than absolute epsilons,
because the identities being verified are exact.
"""
from __future__ import annotations

import os
from contextlib import contextmanager

import mpmath
from mpmath import mp, mpf, mpc

DEFAULT_PRECISION_BITS = 256
ENV_PRECISION = "RESURLAB_PRECISION_BITS"

_bits = max(64, int(os.environ.get(ENV_PRECISION, DEFAULT_PRECISION_BITS)))


def get_precision() -> int:
    """Configured working precision in bits."""
    return _bits


def set_precision(bits: int) -> int:
    """Set the working precision (>= 64 bits); returns the previous value."""
    global _bits
    if bits < 64:
        raise ValueError("working precision must be at least 64 bits")
    old = _bits
    _bits = int(bits)
    return old


@contextmanager
def working_precision(bits: int | None = None, extra: int = 0):
    """Run a block at the configured precision (plus optional guard bits)."""
    with mp.workprec((bits or _bits) + extra):
        yield mp


def eps(bits: int | None = None) -> mpf:
    """Unit roundoff at the working precision."""
    return mpf(2) ** (1 - (bits or _bits))


def to_mpc(x) -> mpc:
    return mpc(x)


def bits_agree(a, b) -> float:
    """Bits of agreement between a and b, relative to their common scale."""
    with mp.workprec(max(_bits, mp.prec)):
        a, b = mpc(a), mpc(b)
        diff = abs(a - b)
        scale = max(abs(a), abs(b))
        if diff == 0 or scale == 0:
            return float(mp.prec)
        rel = diff / scale
        return float(-mpmath.log(rel, 2)) if rel > 0 else float(mp.prec)


def digits_agree(a, b) -> float:
    """Significant decimal digits of agreement between a and b."""
    return bits_agree(a, b) * 0.3010299956639812
