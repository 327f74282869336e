"""Exact arithmetic substrate.

Unbounded rationals (gmpy2.mpq, always in lowest terms with positive
denominator), dense univariate polynomials over Q, reduced rational
functions, and truncated formal Laurent series in 1/x.  The Laurent type
carries its own truncation order and every operation derives the truncation
of its result from the operands, so precision is never silently overstated.

All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

from typing import Iterable, Union

from gmpy2 import mpq, mpz, fac

from .errors import UsageError

QQ = mpq  # the universal exact scalar

Scalar = Union[int, mpz, mpq]
_SCALARS = (int, mpz, mpq)


def as_mpq(value) -> mpq:
    """Coerce ints, Fractions, mpq, or 'a/b' strings to mpq."""
    if isinstance(value, mpq):
        return value
    if isinstance(value, str):
        return mpq(value)
    return mpq(value)


def binom_general(alpha, j: int):
    """Generalized binomial coefficient C(alpha, j).

    alpha may be an int, mpq, or PolyQ; j must be a nonnegative integer.
    C(alpha, 0) = 1 for every alpha.
    """
    if j < 0:
        raise UsageError("binomial lower index must be >= 0")
    prod = alpha - alpha + 1 if isinstance(alpha, PolyQ) else mpq(1)
    for i in range(j):
        prod = prod * (alpha - i)
    return prod / fac(j) if isinstance(prod, PolyQ) else prod / mpq(fac(j))


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class PolyQ:
    """Dense univariate polynomial over Q, coefficients indexed by degree.

    The zero polynomial has an empty coefficient tuple and degree -1; any
    other polynomial has a nonzero leading coefficient.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs",
                           tuple(as_mpq(c) for c in _strip(coeffs)))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("PolyQ is immutable")

    @staticmethod
    def const(c) -> "PolyQ":
        return PolyQ((as_mpq(c),))

    @staticmethod
    def variable() -> "PolyQ":
        return PolyQ((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> mpq:
        if self.is_zero:
            raise UsageError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, d: int) -> mpq:
        return self.coeffs[d] if 0 <= d <= self.degree else mpq(0)

    def _coerce(self, other):
        if isinstance(other, PolyQ):
            return other
        if isinstance(other, _SCALARS):
            return PolyQ((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return PolyQ([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            return PolyQ([c * as_mpq(other) for c in self.coeffs])
        if not isinstance(other, PolyQ):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return PolyQ()
        out = [mpq(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyQ(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, PolyQ):
            raise UsageError("use divmod/RatFunc for polynomial division")
        if scalar == 0:
            raise ZeroDivisionError("division of PolyQ by zero scalar")
        inv = mpq(1) / as_mpq(scalar)
        return PolyQ([c * inv for c in self.coeffs])

    def __pow__(self, e: int):
        if e < 0:
            raise UsageError("negative power of PolyQ")
        out = PolyQ.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        """Evaluate by Horner; works for mpq, int, and PolyQ arguments."""
        acc = PolyQ() if isinstance(x, PolyQ) else mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "PolyQ"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.leading
        quot = [mpq(0)] * max(0, len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / lead
            quot[i - dd] = f
            for j, b in enumerate(other.coeffs):
                rem[i - dd + j] -= f * b
        return PolyQ(quot), PolyQ(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "PolyQ":
        if self.is_zero:
            return self
        return self / self.leading

    @staticmethod
    def gcd(a: "PolyQ", b: "PolyQ") -> "PolyQ":
        """Monic gcd by the Euclidean algorithm."""
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def derivative(self) -> "PolyQ":
        return PolyQ([i * c for i, c in enumerate(self.coeffs)][1:])

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for d in range(self.degree, -1, -1):
            c = self.coeff(d)
            if c == 0:
                continue
            if d == 0:
                term = str(c)
            else:
                xs = "x" if d == 1 else f"x^{d}"
                if c == 1:
                    term = xs
                elif c == -1:
                    term = "-" + xs
                else:
                    term = f"{c}*{xs}"
            parts.append(term)
        out = parts[0]
        for t in parts[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    __repr__ = __str__


X = PolyQ.variable()


class RatFunc:
    """Reduced rational function num/den over Q.

    Normal form: gcd(num, den) = 1 and den monic (leading coefficient 1,
    hence positive), so equality is plain component equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=PolyQ((1,))):
        num = num if isinstance(num, PolyQ) else PolyQ.const(num)
        den = den if isinstance(den, PolyQ) else PolyQ.const(den)
        if den.is_zero:
            raise ZeroDivisionError("RatFunc with zero denominator")
        g = PolyQ.gcd(num, den)
        if not g.is_zero and g.degree > 0:
            num = num // g
            den = den // g
        lead = den.leading
        object.__setattr__(self, "num", num / lead)
        object.__setattr__(self, "den", den / lead)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RatFunc is immutable")

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (*_SCALARS, PolyQ)):
            return RatFunc(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero:
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    @property
    def is_zero(self):
        return self.num.is_zero

    def as_poly(self) -> PolyQ:
        """Return the numerator when den == 1, else raise."""
        if self.den.degree != 0 or self.den.coeff(0) != 1:
            raise UsageError(f"rational function {self} is not a polynomial")
        return self.num

    def __str__(self):
        return f"({self.num})/({self.den})"

    __repr__ = __str__


class LaurentTrunc:
    """Truncated formal Laurent series in 1/x.

    Represents  sum_{k=start}^{trunc} coeffs[k-start] * x^(-k)  known modulo
    O(x^-(trunc+1)).  start may be negative: those entries are genuine
    positive powers of x (needed for p_n - q_n*series remainders).

    Construction strips leading zero coefficients, so start always points at
    the first nonzero coefficient; the zero-to-truncation series has an empty
    coefficient list and start == trunc + 1.
    """

    __slots__ = ("start", "coeffs", "trunc")

    def __init__(self, start: int, coeffs: Iterable, trunc: int):
        coeffs = [as_mpq(c) for c in coeffs]
        if len(coeffs) != trunc - start + 1:
            raise UsageError("LaurentTrunc: len(coeffs) must be trunc-start+1")
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            start += 1
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("LaurentTrunc is immutable")

    @staticmethod
    def zero(trunc: int) -> "LaurentTrunc":
        return LaurentTrunc(trunc + 1, (), trunc)

    @staticmethod
    def from_terms(terms: dict, trunc: int) -> "LaurentTrunc":
        """Build from {order: coeff} with order = exponent of 1/x."""
        if not terms:
            return LaurentTrunc.zero(trunc)
        start = min(terms)
        return LaurentTrunc(
            start, [terms.get(k, 0) for k in range(start, trunc + 1)], trunc)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, order: int) -> mpq:
        """Coefficient of x^(-order); order must not exceed the truncation."""
        if order > self.trunc:
            raise UsageError(f"coefficient of order {order} beyond O(x^-{self.trunc + 1})")
        if order < self.start:
            return mpq(0)
        return self.coeffs[order - self.start]

    @property
    def _start_eff(self) -> int:
        # effective lowest order; trunc+1 for the zero series
        return self.start if self.coeffs else self.trunc + 1

    def first_nonzero(self):
        """(order, coeff) of the lowest-order known term, or None if zero."""
        if self.is_zero:
            return None
        return self.start, self.coeffs[0]

    def __add__(self, other):
        if not isinstance(other, LaurentTrunc):
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        lo = min(self._start_eff, other._start_eff, trunc + 1)
        vals = [ (self.coeff(k) if k >= self.start else mpq(0)) +
                 (other.coeff(k) if k >= other.start else mpq(0))
                 for k in range(lo, trunc + 1) ]
        return LaurentTrunc(lo, vals, trunc)

    def __neg__(self):
        return LaurentTrunc(self.start, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other):
        if not isinstance(other, LaurentTrunc):
            return NotImplemented
        return self + (-other)

    def scalar_mul(self, c) -> "LaurentTrunc":
        c = as_mpq(c)
        if c == 0:
            return LaurentTrunc.zero(self.trunc)
        return LaurentTrunc(self.start, [c * a for a in self.coeffs], self.trunc)

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            return self.scalar_mul(other)
        if not isinstance(other, LaurentTrunc):
            return NotImplemented
        # error term of A is O(x^-(Ma+1)); multiplied by the leading term of B
        # it pollutes order Ma + sb + 1, hence the min below.
        trunc = min(self.trunc + other._start_eff, other.trunc + self._start_eff)
        if self.is_zero or other.is_zero:
            return LaurentTrunc.zero(trunc)
        lo = self.start + other.start
        out = {k: mpq(0) for k in range(lo, trunc + 1)}
        for i, a in enumerate(self.coeffs):
            ka = self.start + i
            if a == 0 or ka + other.start > trunc:
                continue
            for j, b in enumerate(other.coeffs):
                k = ka + other.start + j
                if k > trunc:
                    break
                out[k] += a * b
        return LaurentTrunc.from_terms(out, trunc)

    __rmul__ = __mul__

    def mul_xpow(self, d: int) -> "LaurentTrunc":
        """Multiply by x^d (exact; lowers every order by d)."""
        return LaurentTrunc(self.start - d, self.coeffs, self.trunc - d)

    def mul_poly(self, poly: PolyQ) -> "LaurentTrunc":
        """Multiply by an exact polynomial in x."""
        if poly.is_zero:
            return LaurentTrunc.zero(self.trunc)
        acc = None
        for d, c in enumerate(poly.coeffs):
            if c == 0:
                continue
            term = self.mul_xpow(d).scalar_mul(c)
            acc = term if acc is None else acc + term
        return acc

    def derivative(self) -> "LaurentTrunc":
        """d/dx; the derivative of O(x^-(M+1)) is O(x^-(M+2))."""
        terms = {self.start + i + 1: -(self.start + i) * c
                 for i, c in enumerate(self.coeffs)}
        return LaurentTrunc.from_terms(terms, self.trunc + 1)

    def truncate(self, trunc: int) -> "LaurentTrunc":
        if trunc > self.trunc:
            raise UsageError("cannot extend a truncated series")
        return LaurentTrunc.from_terms(
            {self.start + i: c for i, c in enumerate(self.coeffs)
             if self.start + i <= trunc}, trunc)

    def agrees_with(self, other: "LaurentTrunc", through: int | None = None) -> bool:
        """Coefficientwise equality through min of the truncation orders."""
        m = min(self.trunc, other.trunc)
        if through is not None:
            if through > m:
                raise UsageError("comparison order beyond common truncation")
            m = through
        lo = min(self._start_eff, other._start_eff, m + 1)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, m + 1))

    def __eq__(self, other):
        if not isinstance(other, LaurentTrunc):
            return NotImplemented
        return (self.start, self.coeffs, self.trunc) == \
               (other.start, other.coeffs, other.trunc)

    def __hash__(self):
        return hash((self.start, self.coeffs, self.trunc))

    def __str__(self):
        if self.is_zero:
            return f"O(x^-{self.trunc + 1})"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            k = self.start + i
            if k == 0:
                term = str(c)
            elif k < 0:
                xs = "x" if k == -1 else f"x^{-k}"
                term = xs if c == 1 else f"-{xs}" if c == -1 else f"{c}*{xs}"
            else:
                xs = "1/x" if k == 1 else f"1/x^{k}"
                term = xs if c == 1 else f"-{xs}" if c == -1 else f"{c}*{xs}"
            parts.append(term)
        out = parts[0]
        for t in parts[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out + f" + O(x^-{self.trunc + 1})"

    __repr__ = __str__


def poly_to_laurent(poly: PolyQ, trunc: int) -> LaurentTrunc:
    """Embed an exact polynomial as a LaurentTrunc known to order trunc."""
    return LaurentTrunc.from_terms(
        {-d: c for d, c in enumerate(poly.coeffs) if c != 0}, trunc)


def const_laurent(c, trunc: int) -> LaurentTrunc:
    return LaurentTrunc.from_terms({0: as_mpq(c)}, trunc)


def _series_inverse(b, n: int):
    """First n coefficients of 1/sum(b[j] u^j); requires b[0] != 0."""
    inv0 = mpq(1) / b[0]
    out = [inv0]
    for m in range(1, n):
        s = mpq(0)
        for j in range(1, min(m, len(b) - 1) + 1):
            s += b[j] * out[m - j]
        out.append(-inv0 * s)
    return out


def ratfunc_to_laurent(rat: RatFunc, trunc: int) -> LaurentTrunc:
    """Expand a proper rational function into powers of 1/x, exactly, to
    order `trunc`.  Requires deg(num) < deg(den)."""
    if rat.num.is_zero:
        return LaurentTrunc.zero(trunc)
    dn, dd = rat.num.degree, rat.den.degree
    if dn >= dd:
        raise UsageError("ratfunc_to_laurent requires deg(num) < deg(den)")
    lead = dd - dn  # expansion starts exactly at x^-lead
    if trunc < lead:
        return LaurentTrunc.zero(trunc)
    count = trunc - lead + 1
    arev = list(reversed(rat.num.coeffs))   # num as series in u = 1/x
    brev = list(reversed(rat.den.coeffs))
    binv = _series_inverse(brev, count)
    out = []
    for m in range(count):
        s = mpq(0)
        for j in range(min(m, len(arev) - 1) + 1):
            s += arev[j] * binv[m - j]
        out.append(s)
    return LaurentTrunc(lead, out, trunc)


def laurent_shift(series: LaurentTrunc, lam) -> LaurentTrunc:
    """Re-expand A(x + lam) in powers of 1/x.

    Orders up to the input truncation are exactly determined: the term
    c_k (x+lam)^(-k) only contributes at orders >= k (and for k <= 0 the
    binomial expansion is finite), so no precision is lost.
    """
    lam = as_mpq(lam)
    if lam == 0 or series.is_zero:
        return series
    trunc = series.trunc
    out = {m: mpq(0) for m in range(series.start, trunc + 1)}
    lam_pows = [mpq(1)]
    for _ in range(trunc - series.start):
        lam_pows.append(lam_pows[-1] * lam)
    for i, c in enumerate(series.coeffs):
        if c == 0:
            continue
        k = series.start + i
        # (x+lam)^(-k) = sum_j C(-k, j) lam^j x^(-k-j); finite when k <= 0
        binom = mpq(1)
        for j in range(trunc - k + 1):
            if j > 0:
                binom = binom * (-k - (j - 1)) / j
                if binom == 0:
                    break
            out[k + j] += c * binom * lam_pows[j]
    return LaurentTrunc.from_terms(out, trunc)


def laurent_scale(series: LaurentTrunc, c) -> LaurentTrunc:
    """A(c*x): the coefficient of x^(-k) is multiplied by c^(-k)."""
    c = as_mpq(c)
    if c == 0:
        raise UsageError("laurent_scale requires c != 0")
    terms = {}
    for i, a in enumerate(series.coeffs):
        k = series.start + i
        terms[k] = a * c ** (-k)
    return LaurentTrunc.from_terms(terms, series.trunc)


def laurent_compose_affine(series: LaurentTrunc, c, lam) -> LaurentTrunc:
    """A(c*x + lam) via scale-then-shift."""
    c = as_mpq(c)
    return laurent_shift(laurent_scale(series, c), as_mpq(lam) / c)


def fc_poly_den(k: int, variant: str = "x") -> PolyQ:
    """Denominator polynomial of fc(k, .): x(x+1)...(x+k), or the same with
    x -> 1-x expanded in x."""
    den = PolyQ.const(1)
    for i in range(k + 1):
        if variant == "x":
            den = den * PolyQ((i, 1))
        else:
            den = den * PolyQ((1 + i, -1))
    return den


def fc_ratfunc(k: int, variant: str = "x") -> RatFunc:
    """fc(k, x) = k!/(x(x+1)...(x+k)) as a rational function, or its
    1-x variant."""
    if k < 0:
        raise UsageError("fc requires k >= 0")
    if variant not in ("x", "1-x"):
        raise UsageError("variant must be 'x' or '1-x'")
    return RatFunc(PolyQ.const(fac(k)), fc_poly_den(k, variant))


def fc_laurent(k: int, variant: str = "x", trunc: int = 10) -> LaurentTrunc:
    """1/x-expansion of fc(k, x) (or fc(k, 1-x)) to order `trunc`.

    The leading term sits at order k+1, so trunc < k+1 holds no content and
    is rejected.
    """
    if trunc < k + 1:
        raise UsageError("fc_laurent: truncation below leading order k+1")
    return ratfunc_to_laurent(fc_ratfunc(k, variant), trunc)
