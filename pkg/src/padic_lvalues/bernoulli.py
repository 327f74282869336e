"""Bernoulli numbers and derived coefficient streams.

Convention: t/(e^t - 1) = sum B_n t^n/n!, so B_1 = -1/2.  Production values
come from the shift recurrence sum_{k=0}^{n} C(n,k) B_k = B_n (valid for
n != 1), solved for the top index; the test suite re-derives everything by
exact power-series division as an independent oracle.

Also here: tangent numbers T_n (tanh(t/2) = sum T_n t^n/n!), the twisted
numbers t_n = (2^(n+1)-2) B_n, the generalized B_n(a,F), and the exact
Laurent expansions of the four series

    THETA        sum t_n (-1/x)^(n+1)
    R            sum B_n (-1/x)^(n+1)
    T            sum (n+1) B_n (-1/x)^(n+2)
    THETA_SMALL  sum_{n>=1} (2^(n+1)-2) (B_n/n) (-1/x)^n
"""

from __future__ import annotations

import enum
import threading

from gmpy2 import mpq, mpz

from .errors import UsageError
from .exact import LaurentTrunc

_lock = threading.Lock()
_cache = [mpq(1)]  # B_0; append-only, guarded by _lock


def _extend_cache(n: int) -> None:
    # B_m = -(1/(m+1)) * sum_{j<m} C(m+1, j) B_j  for m >= 1
    for m in range(len(_cache), n + 1):
        binom = mpz(1)  # C(m+1, 0)
        acc = mpq(0)
        for j in range(m):
            acc += binom * _cache[j]
            binom = binom * (m + 1 - j) // (j + 1)
        _cache.append(-acc / (m + 1))


def bernoulli(n: int) -> mpq:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n < 0:
        raise UsageError("bernoulli requires n >= 0")
    if n >= len(_cache):
        with _lock:
            _extend_cache(n)
    return _cache[n]


def bernoulli_range(n: int) -> list:
    """B_0..B_n as a list (fills the cache in one pass)."""
    bernoulli(n)
    return _cache[:n + 1]


def t_number(n: int) -> mpq:
    """t_n = (2^(n+1) - 2) * B_n, the coefficient stream of THETA."""
    if n < 0:
        raise UsageError("t_number requires n >= 0")
    return (mpz(2) ** (n + 1) - 2) * bernoulli(n)


def series_div(num, den, count: int) -> list:
    """First `count` coefficients of num(t)/den(t) for exact power series
    given by coefficient lists; requires den[0] != 0."""
    if not den or den[0] == 0:
        raise UsageError("series_div requires den[0] != 0")
    inv0 = mpq(1) / den[0]
    out = []
    for m in range(count):
        s = mpq(num[m]) if m < len(num) else mpq(0)
        for j in range(1, min(m, len(den) - 1) + 1):
            s -= den[j] * out[m - j]
        out.append(s * inv0)
    return out


def tangent_numbers(max_n: int) -> list:
    """T_0..T_max_n with tanh(t/2) = (e^t-1)/(e^t+1) = sum T_n t^n/n!."""
    if max_n < 0:
        raise UsageError("tangent_numbers requires max_n >= 0")
    inv_fact = [mpq(1)]
    for i in range(1, max_n + 1):
        inv_fact.append(inv_fact[-1] / i)
    num = [mpq(0)] + inv_fact[1:]            # e^t - 1
    den = [mpq(2)] + inv_fact[1:]            # e^t + 1
    coeffs = series_div(num, den, max_n + 1)
    fact = mpz(1)
    out = []
    for n, c in enumerate(coeffs):
        out.append(c * fact)
        fact *= n + 1
    return out


def bernoulli_aF(n: int, a: int, F: int) -> mpq:
    """B_n(a,F) = (a^n/F) sum_j C(n,j) B_j (F/a)^j, the coefficients of
    t e^{at}/(e^{Ft}-1)."""
    if n < 0:
        raise UsageError("bernoulli_aF requires n >= 0")
    if F < 1:
        raise UsageError("bernoulli_aF requires F >= 1")
    if a == 0:
        raise UsageError("bernoulli_aF requires a != 0 (formula divides by a)")
    bernoulli(n)
    ratio = mpq(F, a)
    binom = mpz(1)
    pw = mpq(1)
    acc = mpq(0)
    for j in range(n + 1):
        acc += binom * _cache[j] * pw
        binom = binom * (n - j) // (j + 1)
        pw *= ratio
    return acc * mpq(a) ** n / F


class SeriesKind(enum.Enum):
    THETA = "theta"
    R = "R"
    T = "T"
    THETA_SMALL = "theta_small"


def series_laurent(kind: SeriesKind, trunc: int) -> LaurentTrunc:
    """Exact truncated Laurent expansion of the chosen series to order
    `trunc` (coefficient of x^-k for k <= trunc)."""
    if trunc < 1:
        raise UsageError("series_laurent requires trunc >= 1")
    terms = {}
    if kind is SeriesKind.R:
        for k in range(1, trunc + 1):
            terms[k] = (-1) ** k * bernoulli(k - 1)
    elif kind is SeriesKind.T:
        for k in range(2, trunc + 1):
            terms[k] = (-1) ** k * (k - 1) * bernoulli(k - 2)
    elif kind is SeriesKind.THETA:
        for k in range(1, trunc + 1):
            terms[k] = (-1) ** k * t_number(k - 1)
    elif kind is SeriesKind.THETA_SMALL:
        # the n = 0 term is absent (t_0/0 undefined); start order is 1
        for k in range(1, trunc + 1):
            terms[k] = (-1) ** k * (mpz(2) ** (k + 1) - 2) * bernoulli(k) / k
    else:  # pragma: no cover
        raise UsageError(f"unknown series kind {kind!r}")
    return LaurentTrunc.from_terms(terms, trunc)
