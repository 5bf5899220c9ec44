"""Log-domain (base 2) probability arithmetic.

All probabilities in this package are stored as base-2 logarithms so that
long products of small rule probabilities never underflow.  Entropies in
bits fall straight out of the representation.
"""

import math

LOG_ZERO = float("-inf")
LOG_ONE = 0.0

_LN2 = math.log(2.0)


def log2prob(p):
    """Base-2 log of a linear probability; 0.0 maps to -inf."""
    if p < 0.0:
        raise ValueError("negative probability %r" % p)
    if p == 0.0:
        return LOG_ZERO
    return math.log2(p)


def prob(logp):
    """Linear probability of a base-2 log value (underflows to 0.0)."""
    if logp == LOG_ZERO:
        return 0.0
    try:
        return 2.0 ** logp
    except OverflowError:
        return math.inf


def logadd(x, y):
    """log2(2^x + 2^y), computed as max + log1p(2^diff)."""
    if x == LOG_ZERO:
        return y
    if y == LOG_ZERO:
        return x
    if x < y:
        x, y = y, x
    d = y - x
    if d < -1074:  # 2^d underflows; the smaller term is invisible
        return x
    return x + math.log1p(2.0 ** d) / _LN2


def logsum(values):
    """log2 of the sum of 2^v over values, accumulated in iteration order."""
    total = LOG_ZERO
    for v in values:
        total = logadd(total, v)
    return total
