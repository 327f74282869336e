"""Precision-tracked p-adic numbers.

A PadicApprox stores a value known modulo p^N (absolute precision) as
p^v * u with a unit u.  The valuation v may be negative.  Arithmetic derives
the precision of every result from its operands and never overstates it;
running out of digits raises PrecisionError rather than wrapping silently.

Also here: the Teichmuller character, the one-unit part <x> = x/omega(x),
and a series summation engine driven by sound valuation lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import gmpy2
from gmpy2 import mpq, mpz

from .errors import BoundError, PrecisionError, UsageError


def vp_int(n, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = mpz(n)
    if n == 0:
        raise UsageError("valuation of 0 is +infinity")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_mpq(q, p: int) -> int:
    q = mpq(q)
    if q == 0:
        raise UsageError("valuation of 0 is +infinity")
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def vp_factorial(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def ilog(p: int, n: int) -> int:
    """floor(log_p n) for n >= 1."""
    if n < 1:
        raise UsageError("ilog requires n >= 1")
    e, q = 0, p
    while q <= n:
        e += 1
        q *= p
    return e


def _require_prime(p) -> int:
    p = int(p)
    if p < 2 or not gmpy2.is_prime(p):
        raise UsageError(f"{p} is not prime")
    return p


class PadicApprox:
    """A p-adic number known to absolute precision p^N.

    Nonzero: value = p^v * u mod p^N with 0 < u < p^(N-v), p does not
    divide u, and v < N.  Zero to precision: u is None (the value is only
    known to be divisible by p^N).
    """

    __slots__ = ("p", "N", "v", "u")

    def __init__(self, p: int, N: int, v: int, u):
        if N <= v and u is not None:
            raise PrecisionError(f"no digits: valuation {v} >= precision {N}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("PadicApprox is immutable")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(p: int, N: int) -> "PadicApprox":
        return PadicApprox(p, N, N, None)

    @staticmethod
    def from_rational(q, p: int, N: int) -> "PadicApprox":
        """Exact image of a rational modulo p^N; supports negative valuation
        as long as at least one digit remains (v > -N)."""
        p = _require_prime(p)
        if N < 1:
            raise UsageError("precision N must be >= 1")
        q = mpq(q)
        if q == 0:
            return PadicApprox.zero(p, N)
        v = vp_mpq(q, p)
        if v >= N:
            return PadicApprox.zero(p, N)
        if v <= -N:
            raise PrecisionError(
                f"valuation {v} <= -N = {-N}: no representable digits")
        num, den = q.numerator, q.denominator
        vn = vp_int(num, p)
        num //= mpz(p) ** vn
        vd = vp_int(den, p)
        den //= mpz(p) ** vd
        mod = mpz(p) ** (N - v)
        u = (num % mod) * gmpy2.invert(den, mod) % mod
        return PadicApprox(p, N, v, u)

    # -- basic queries -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        """Zero to the stored precision."""
        return self.u is None

    @property
    def valuation(self):
        """Exact valuation, or None when the value is 0 mod p^N."""
        return None if self.u is None else self.v

    @property
    def vlb(self) -> int:
        """Sound lower bound for the valuation (N when zero to precision)."""
        return self.N if self.u is None else self.v

    def _veff(self) -> int:
        return self.N if self.u is None else self.v

    def _check_compat(self, other: "PadicApprox"):
        if self.p != other.p:
            raise UsageError("mixed primes in p-adic arithmetic")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, mpq)):
            other = PadicApprox.from_rational(other, self.p, self.N)
        if not isinstance(other, PadicApprox):
            return NotImplemented
        self._check_compat(other)
        p = mpz(self.p)
        N = min(self.N, other.N)
        w = min(self._veff(), other._veff(), N)
        mod = p ** (N - w)
        s = mpz(0)
        for t in (self, other):
            if t.u is not None:
                s += t.u * p ** (t.v - w)
        s %= mod
        if s == 0:
            return PadicApprox.zero(self.p, N)
        dv = vp_int(s, self.p)
        v = w + dv
        if v >= N:
            return PadicApprox.zero(self.p, N)
        return PadicApprox(self.p, N, v, s // p ** dv)

    __radd__ = __add__

    def __neg__(self):
        if self.u is None:
            return self
        mod = mpz(self.p) ** (self.N - self.v)
        return PadicApprox(self.p, self.N, self.v, mod - self.u)

    def __sub__(self, other):
        if isinstance(other, (int, mpq)):
            other = PadicApprox.from_rational(other, self.p, self.N)
        if not isinstance(other, PadicApprox):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, mpq)):
            other = PadicApprox.from_rational(other, self.p, self.N)
        if not isinstance(other, PadicApprox):
            return NotImplemented
        self._check_compat(other)
        N = min(self._veff() + other.N, other._veff() + self.N)
        if self.u is None or other.u is None:
            return PadicApprox.zero(self.p, N)
        v = self.v + other.v
        mod = mpz(self.p) ** (N - v)
        return PadicApprox(self.p, N, v, (self.u * other.u) % mod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, mpq)):
            other = PadicApprox.from_rational(other, self.p, self.N)
        if not isinstance(other, PadicApprox):
            return NotImplemented
        self._check_compat(other)
        if other.u is None:
            raise PrecisionError("division by a value that is 0 to precision")
        if self.u is None:
            N = self.N - other.v
            if N < 1:
                raise PrecisionError("division exhausts all digits")
            return PadicApprox.zero(self.p, N)
        r = min(self.N - self.v, other.N - other.v)
        v = self.v - other.v
        N = v + r
        if N < 1:
            raise PrecisionError("division exhausts all digits")
        mod = mpz(self.p) ** r
        u = (self.u % mod) * gmpy2.invert(other.u % mod, mod) % mod
        return PadicApprox(self.p, N, v, u)

    def __rtruediv__(self, other):
        return PadicApprox.from_rational(other, self.p, self.N) / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise UsageError("only integer exponents are supported")
        if e == 0:
            return PadicApprox.from_rational(1, self.p, self.N)
        if e < 0:
            return (1 / self) ** (-e)
        out = None
        base = self
        while e:
            if e & 1:
                out = base if out is None else out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def with_precision(self, N: int) -> "PadicApprox":
        """Truncate to a lower (or equal) absolute precision."""
        if N > self.N:
            raise PrecisionError(
                f"cannot raise precision {self.N} to {N}")
        if self.u is None or self.v >= N:
            return PadicApprox.zero(self.p, N)
        return PadicApprox(self.p, N, self.v,
                           self.u % mpz(self.p) ** (N - self.v))

    # -- comparisons and rendering ------------------------------------------

    def same_value(self, other: "PadicApprox") -> bool:
        """Agreement modulo p^min(N_self, N_other)."""
        self._check_compat(other)
        N = min(self.N, other.N)
        a, b = self.with_precision(N), other.with_precision(N)
        return (a.v, a.u) == (b.v, b.u) if a.u is not None and b.u is not None \
            else a.u is None and b.u is None

    def digits(self):
        """List of (exponent, digit) with digit in [1, p), lowest first."""
        if self.u is None:
            return []
        out = []
        u = mpz(self.u)
        e = self.v
        p = self.p
        while u > 0:
            u, d = divmod(u, p)
            if d:
                out.append((e, int(d)))
            e += 1
        return out

    def __str__(self):
        tail = f"O({self.p}^{self.N})"
        if self.u is None:
            return "0 + " + tail
        parts = []
        for e, d in self.digits():
            if e == 0:
                parts.append(f"{d}")
            elif e == 1:
                parts.append(f"{d}*{self.p}")
            else:
                parts.append(f"{d}*{self.p}^{e}")
        return " + ".join(parts + [tail])

    def __repr__(self):
        return f"PadicApprox({self})"


def teichmuller(m: int, p: int, N: int) -> PadicApprox:
    """Teichmuller character omega(m) to precision p^N.

    For odd p and gcd(m, p) = 1 this is the unique (p-1)-st root of unity
    congruent to m mod p, obtained by iterating x -> x^p (each step lifts
    the congruence one digit).  For p = 2 and odd m it is (-1)^((m-1)/2);
    for p | m it is 0.
    """
    p = _require_prime(p)
    if N < 1:
        raise UsageError("precision N must be >= 1")
    if m % p == 0:
        return PadicApprox.zero(p, N)
    if p == 2:
        sign = 1 if m % 4 == 1 else -1
        return PadicApprox.from_rational(sign, 2, N)
    mod = mpz(p) ** N
    x = mpz(m) % mod
    for _ in range(N + 2):
        nxt = gmpy2.powmod(x, p, mod)
        if nxt == x:
            break
        x = nxt
    return PadicApprox(p, N, 0, x)


def angle(x: int, p: int, N: int) -> PadicApprox:
    """One-unit part <x> = x/omega(x); congruent to 1 mod p (mod 4 if p=2)."""
    p = _require_prime(p)
    if x % p == 0:
        raise UsageError("<x> requires gcd(x, p) = 1")
    return PadicApprox.from_rational(x, p, N) / teichmuller(x, p, N)


@dataclass(frozen=True)
class ValuationBound:
    """Sound lower bound fn(n) <= v_p(term_n), nondecreasing for
    n >= monotone_from and divergent to +infinity."""
    fn: Callable[[int], int]
    monotone_from: int = 0


def sum_series(term_at: Callable[[int], mpq], bound: ValuationBound,
               p: int, N: int, hard_cap: int = 10 ** 6) -> PadicApprox:
    """Sum term_at(0) + term_at(1) + ... modulo p^N.

    Terms are exact rationals and are accumulated exactly; summation stops at
    the first n >= bound.monotone_from with bound.fn(n) >= N, at which point
    every remaining term (hence the whole tail, ultrametrically) is 0 mod
    p^N.  A bound that fails to reach N within hard_cap terms raises
    BoundError.
    """
    p = _require_prime(p)
    total = mpq(0)
    n = 0
    while True:
        if n >= bound.monotone_from and bound.fn(n) >= N:
            break
        if n >= hard_cap:
            raise BoundError(
                f"valuation bound did not reach {N} within {hard_cap} terms")
        total += term_at(n)
        n += 1
    return PadicApprox.from_rational(total, p, N)
