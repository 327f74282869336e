"""The four convergent families and their exact data.

Families (normalized three-term recurrences, ground truth for everything
else; the continued fractions themselves are derived views):

    I    (n+1)^2 u_{n+1} = (x^2 - x + 2n^2 + 2n + 1) u_n - n^2 u_{n-1}
    II   (n+1)^2 u_{n+1} = (2n+1)(2x-1) u_n + n^2 u_{n-1}
    III  (n+1)^3 u_{n+1} = (2n+1)(2x^2 - 2x + n^2 + n + 1) u_n - n^3 u_{n-1}
    IV   (n+1)   u_{n+1} = (2x-1) u_n + n u_{n-1}

Each family carries two solutions p_n, q_n; p_n/q_n are the Pade-type
convergents of THETA, R, T, theta respectively.  For family I the
convergents approach -THETA (the published remainder statement has the
sign of Theta(n,x) inverted; see the decisions ledger), so the p-adic
limit of p_n/q_n there is -Theta_p(a/F).

Everything runs in two scalar modes through the same code path: numeric
(x an exact rational) and symbolic (x the PolyQ variable).
"""

from __future__ import annotations

import csv as _csv
import io
import math
from dataclasses import dataclass
from typing import Optional

from gmpy2 import fac, mpq, mpz

from .bernoulli import SeriesKind
from .errors import PrecisionError, UsageError
from .exact import PolyQ, RatFunc, as_mpq, binom_general
from .lvalues import EvalPoint, eval_series
from .padic import PadicApprox, ValuationBound, ilog, sum_series, vp_factorial


@dataclass(frozen=True)
class Family:
    tag: str
    kind: SeriesKind   # series this family's convergents belong to
    limit_sign: int    # p_n/q_n -> limit_sign * (series value)
    p1: int            # p_0 = 0, q_0 = 1 always
    order_offset: tuple  # Pade order = order_offset[0]*n + order_offset[1]
    lcm_exp: int       # estimates: p_n denominator | lcm(1..n)^lcm_exp * mu^mu_exp
    mu_exp: int

    def lhs(self, n: int) -> int:
        e = {"I": 2, "II": 2, "III": 3, "IV": 1}[self.tag]
        return (n + 1) ** e

    def mid(self, n: int, x):
        if self.tag == "I":
            return x * x - x + (2 * n * (n + 1) + 1)
        if self.tag == "II":
            return (2 * n + 1) * (2 * x - 1)
        if self.tag == "III":
            return (2 * n + 1) * (2 * x * x - 2 * x + (n * n + n + 1))
        return 2 * x - 1

    def low(self, n: int) -> int:
        # signed coefficient of u_{n-1}
        return {"I": -n * n, "II": n * n, "III": -n ** 3, "IV": n}[self.tag]

    def q1(self, x):
        if self.tag == "I":
            return x * x - x + 1
        if self.tag == "III":
            return 2 * x * x - 2 * x + 1
        return 2 * x - 1

    def order(self, n: int) -> int:
        a, b = self.order_offset
        return a * n + b


FAMILIES = {
    "I": Family("I", SeriesKind.THETA, -1, 1, (2, 2), 2, 2),
    "II": Family("II", SeriesKind.R, +1, -2, (1, 1), 2, 1),
    "III": Family("III", SeriesKind.T, +1, 2, (2, 2), 3, 2),
    "IV": Family("IV", SeriesKind.THETA_SMALL, +1, 2, (1, 0), 2, 1),
}


def get_family(tag: str) -> Family:
    try:
        return FAMILIES[tag.upper()]
    except KeyError:
        raise UsageError(f"unknown family {tag!r} (expected I, II, III, IV)") from None


@dataclass(frozen=True)
class ConvergentRow:
    n: int
    p: object  # mpq or PolyQ, matching the mode
    q: object


def _coerce_x(x):
    if isinstance(x, PolyQ):
        return x
    return as_mpq(x)


def convergent_seq(fam: Family | str, x, n_max: int) -> list:
    """Rows 0..n_max of (p_n, q_n) by the forward recurrence, exactly."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    if n_max < 1:
        raise UsageError("convergent_seq requires n_max >= 1")
    x = _coerce_x(x)
    one = PolyQ.const(1) if isinstance(x, PolyQ) else mpq(1)
    rows = [ConvergentRow(0, one * 0, one),
            ConvergentRow(1, one * fam.p1, fam.q1(x))]
    for n in range(1, n_max):
        inv = mpq(1, fam.lhs(n))
        mid = fam.mid(n, x)
        low = fam.low(n)
        p = (mid * rows[n].p + low * rows[n - 1].p) * inv
        q = (mid * rows[n].q + low * rows[n - 1].q) * inv
        rows.append(ConvergentRow(n + 1, p, q))
    return rows


# ---------------------------------------------------------------------------
# closed binomial forms
# ---------------------------------------------------------------------------

def _prod_tables(x, n: int):
    """G[m] = prod_{t=1..m} (t - x)  and  H[m] = (x)_m = prod_{t=0..m-1} (x+t).

    These give C(-x,k) = (-1)^k H[k]/k!, C(k-x,k) = G[k]/k!, and the ratios
    inside the published p_n sums."""
    one = PolyQ.const(1) if isinstance(x, PolyQ) else mpq(1)
    G, H = [one], [one]
    for t in range(1, n + 1):
        G.append(G[-1] * (t - x))
        H.append(H[-1] * (x + (t - 1)))
    return G, H


def closed_form_q(fam: Family | str, n: int, x):
    """The published binomial closed form of q_n, exactly."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    if n < 0:
        raise UsageError("closed_form_q requires n >= 0")
    x = _coerce_x(x)
    G, H = _prod_tables(x, n)
    inv_fact = [mpq(1)]
    for i in range(1, n + 1):
        inv_fact.append(inv_fact[-1] / i)
    total = 0
    if fam.tag == "I":
        # sum C(n,k) C(-x,k) C(k-x,k)
        for k in range(n + 1):
            sign = 1 if k % 2 == 0 else -1
            total = total + mpz(fac(n)) // (fac(k) * fac(n - k)) * sign \
                * H[k] * G[k] * (inv_fact[k] * inv_fact[k])
    elif fam.tag == "II":
        # (-1)^n sum C(n,k) C(n+k,k) C(-x,k)
        for k in range(n + 1):
            sign = 1 if k % 2 == 0 else -1
            c = mpz(fac(n + k)) // (fac(k) * fac(k) * fac(n - k))
            total = total + c * sign * H[k] * inv_fact[k]
        if n % 2 == 1:
            total = -total
    elif fam.tag == "III":
        # sum C(n,k) C(n+k,k) C(-x,k) C(-x+k,k); C(-x,k) = (-1)^k (x)_k / k!
        for k in range(n + 1):
            sign = 1 if k % 2 == 0 else -1
            c = mpz(fac(n + k)) // (fac(k) * fac(k) * fac(n - k))
            total = total + c * sign * H[k] * G[k] * (inv_fact[k] * inv_fact[k])
    elif fam.tag == "IV":
        # (-1)^n sum C(n,k) C(-x,k) 2^k
        for k in range(n + 1):
            sign = 1 if k % 2 == 0 else -1
            c = mpz(fac(n)) // (fac(k) * fac(n - k))
            total = total + c * sign * H[k] * inv_fact[k] * mpz(2) ** k
        if n % 2 == 1:
            total = -total
    return total


def closed_form_q_alt(fam: Family | str, n: int, x):
    """The alternative published q_n forms (families I and II only):
    I:  sum (1-x)_{n-k} (x)_k^2 / ((n-k)! (k!)^2)
    II: sum_{k<=n/2} C(2x-1, n-2k) C(-x,k)^2
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    x = _coerce_x(x)
    G, H = _prod_tables(x, n)
    total = 0
    if fam.tag == "I":
        for k in range(n + 1):
            total = total + G[n - k] * H[k] * H[k] \
                / (mpz(fac(n - k)) * fac(k) ** 2)
        return total
    if fam.tag == "II":
        for k in range(n // 2 + 1):
            ck = binom_general(-x, k)
            total = total + binom_general(2 * x - 1, n - 2 * k) * ck * ck
        return total
    raise UsageError("alternative q form is published only for families I and II")


def closed_form_p(fam: Family | str, n: int, x):
    """The published closed forms of p_n (families I, II, III).

    Family II divides by C(-x, j); numeric x in {1, ..., n} makes one of
    those binomials vanish and is rejected, matching the published formula's
    genuine poles (the recurrence itself has none).  The overall sign of the
    family II formula is corrected to match the recurrence (ledger).
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    if n < 1:
        raise UsageError("closed_form_p requires n >= 1")
    x = _coerce_x(x)
    symbolic = isinstance(x, PolyQ)
    G, H = _prod_tables(x, n)

    if fam.tag in ("I", "III"):
        jexp = 2 if fam.tag == "I" else 3
        total = 0
        for k in range(1, n + 1):
            cnk = mpz(fac(n)) // (fac(k) * fac(n - k))
            if fam.tag == "III":
                cnk = mpz(fac(n + k)) // (fac(k) * fac(k) * fac(n - k))
            inner = 0
            for j in range(1, k + 1):
                # C(k-x, k-j) C(-x-j, k-j) = G[k]/G[j] * H[k]/H[j] * (-1)^(k-j) / ((k-j)!)^2
                ckj = mpz(fac(k)) // (fac(j) * fac(k - j))
                num = G[k] * H[k]
                if symbolic:
                    frac = RatFunc(num, G[j] * H[j])
                else:
                    frac = num / (G[j] * H[j])
                sgn = 1 if (k - j) % 2 == 0 else -1
                sgn *= 1 if (j - 1) % 2 == 0 else -1
                inner = inner + frac * mpq(sgn, mpz(j) ** jexp * ckj ** 2 * fac(k - j) ** 2)
            total = total + inner * cnk
        if symbolic and isinstance(total, RatFunc):
            total = total.as_poly()
        return total

    if fam.tag == "II":
        # (-1)^(n-1) sum_k C(n,k) C(n+k,k) C(-x,k) sum_{j<=k} (-1)^j/(j^2 C(-x,j))
        if not symbolic:
            xq = as_mpq(x)
            if xq.denominator == 1 and 1 <= xq <= n:
                raise UsageError(
                    f"family II closed form has a pole at integer x={xq} <= n")
        # C(-x,j) = (-1)^j H[j]/j!  =>  (-1)^j / C(-x,j) = j!/H[j]
        inner = 0
        total = 0
        for k in range(1, n + 1):
            if symbolic:
                inner = inner + RatFunc(PolyQ.const(fac(k)), H[k] * (mpz(k) ** 2))
            else:
                inner = inner + mpq(fac(k), mpz(k) ** 2) / H[k]
            c = mpz(fac(n + k)) // (fac(k) * fac(k) * fac(n - k))
            sign = 1 if k % 2 == 0 else -1
            total = total + c * sign * (H[k] / mpz(fac(k))) * inner
        if n % 2 == 0:
            total = -total
        if symbolic and isinstance(total, RatFunc):
            total = total.as_poly()
        return total

    raise UsageError("no published closed form for p_n of family IV")


# ---------------------------------------------------------------------------
# determinant identities, limits, remainders
# ---------------------------------------------------------------------------

def det_identity(fam: Family | str, n: int, x):
    """p_{n+1} q_n - p_n q_{n+1}, computed from the recurrence rows."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    rows = convergent_seq(fam, x, n + 1)
    return rows[n + 1].p * rows[n].q - rows[n].p * rows[n + 1].q


def expected_det(fam: Family | str, n: int) -> mpq:
    """Exact right side of the determinant identity, from D_0 and the
    recurrence: D_n = (-low(n)/lhs(n)) D_{n-1}.

    I: 1/(n+1)^2,  II: (-1)^(n-1) 2/(n+1)^2,  III: 2/(n+1)^3 (the published
    display drops the factor 2; ledger),  IV: (-1)^n 2/(n+1).
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    d = mpq(fam.p1)  # D_0 = p_1 q_0 - p_0 q_1 = p_1
    for j in range(1, n + 1):
        d = d * mpq(-fam.low(j), fam.lhs(j))
    return d


def cf_limit(fam: Family | str, pt: EvalPoint, N: int) -> PadicApprox:
    """The p-adic limit of p_n/q_n at the point: limit_sign * series value."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    val = eval_series(fam.kind, pt, N)
    return val if fam.limit_sign == 1 else -val


def remainder_bound(fam: Family | str, pt: EvalPoint, n: int) -> float:
    """The published valuation lower bound for p_n - q_n * limit (n >= 1):

    I:   2n(r + 1/(p-1)) - 2 - 2 log_p n
    II:   n(r + 1/(p-1)) - 1 -   log_p(2n+1)
    III: 2n(r + 1/(p-1)) - 2 -   log_p((2n+1) n^2)
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    if n < 1:
        raise UsageError("remainder bounds are stated for n >= 1")
    p, r = pt.p, pt.r
    rate = r + 1.0 / (p - 1)
    lg = lambda m: 0.0 if m <= 1 else math.log(m) / math.log(p)
    if fam.tag == "I":
        return 2 * n * rate - 2 - 2 * lg(n)
    if fam.tag == "II":
        return n * rate - 1 - lg(2 * n + 1)
    if fam.tag == "III":
        return 2 * n * rate - 2 - lg((2 * n + 1) * n * n)
    raise UsageError("no published remainder bound for family IV")


def remainder_series_value(fam: Family | str, pt: EvalPoint, n: int,
                           N: int) -> PadicApprox:
    """p-adic value of the remainder series directly:

        I:   Theta(n,x) = (-1)^n sum_{k>=n} C(k,n) fc(k,x) fc(k,1-x)
        II:  R(n,x)     = (-1)^n sum_{k>=n} w(k,n) fc(k,x)
        III: T(n,x)     = (-1)^n sum_{k>=n} w(k,n) fc(k,x) fc(k,1-x)
        IV: -theta(n,x) = (-1)^(n+1) sum_{k>=n} C(k,n) 2^-k fc(k,x)

    with w(k,n) = k(k-1)...(k-n+1)/((k+1)...(k+n+1)).  These equal
    p_n - q_n * limit by the remainder propositions (verified symbolically
    in certify.check_pade_order), but need no subtractive cancellation, so
    they stay measurable when q_n's denominator has eaten the precision of
    the subtraction route.  Tail bounds: Legendre for the fc factors plus
    v_p of the w-denominator bounded through v_p((k+n+1)!/k!) <=
    v_p((n+1)!) + log_p(k+n+1)."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    p, r = pt.p, pt.r
    if fam.tag == "IV" and p == 2:
        raise UsageError("series remainder for family IV is unavailable at p = 2")
    from .lvalues import _fc_values  # incremental unit-structure fc stream

    gen = _fc_values(pt)
    cache: list = []

    def fc_pair(k):
        while len(cache) <= k:
            cache.append(next(gen))
        return cache[k]

    sign = -1 if n % 2 else 1
    if fam.tag == "IV":
        sign = -sign  # remainder is -theta(n, x)

    def weight(k):
        if k < n:
            return mpq(0)
        if fam.tag in ("I", "IV"):
            num = mpz(fac(k)) // (fac(n) * fac(k - n))  # C(k, n)
            return mpq(num) / mpz(2) ** k if fam.tag == "IV" else mpq(num)
        num = mpz(1)
        for i in range(n):
            num *= k - i
        den = mpz(1)
        for i in range(1, n + 2):
            den *= k + i
        return mpq(num, den)

    pair = fam.tag in ("I", "III")
    w_pen = 0 if fam.tag == "I" else (vp_factorial(n + 1, p) if fam.tag != "IV" else 0)

    def term(k):
        w = weight(k)
        if w == 0:
            return mpq(0)
        f = fc_pair(k)
        val = f[0] * f[1] if pair else f[0]
        return sign * w * val

    mult = 2 if pair else 1

    def bound(k):
        b = mult * (vp_factorial(k, p) + (k + 1) * r)
        if fam.tag in ("II", "III"):
            b -= w_pen + ilog(p, k + n + 1)
        if fam.tag == "IV":
            b -= k  # the 2^-k weight (p odd only; still divergent)
        return b

    return sum_series(term, ValuationBound(bound, monotone_from=n), p, N)


def remainder_valuation(fam: Family | str, pt: EvalPoint, N: int, n_max: int,
                        value: Optional[PadicApprox] = None,
                        route: str = "auto") -> list:
    """[(n, valuation lower bound of p_n - q_n * limit)] for n = 0..n_max.

    route="subtract" forms p_n - q_n * limit in p-adic arithmetic (the
    limit computed once at precision N); when the subtraction leaves fewer
    digits than the published bound asks for, PrecisionError is raised.
    route="series" evaluates the remainder series directly at precision N.
    route="auto" uses the subtraction wherever it retains enough digits and
    falls back to the series elsewhere (the two are cross-checked in the
    test suite on their common range).
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    if route not in ("auto", "subtract", "series"):
        raise UsageError("route must be auto, subtract, or series")
    if route != "series" and value is None:
        value = cf_limit(fam, pt, N)
    rows = convergent_seq(fam, pt.x, n_max)
    p = pt.p
    out = []
    for row in rows:
        if route == "series":
            out.append((row.n, remainder_series_value(fam, pt, row.n, N).vlb))
            continue
        rem = PadicApprox.from_rational(row.p, p, N) \
            - PadicApprox.from_rational(row.q, p, N) * value
        exhausted = (rem.is_zero and fam.tag != "IV" and row.n >= 1
                     and rem.N < remainder_bound(fam, pt, row.n))
        if exhausted and route == "subtract":
            raise PrecisionError(
                f"N={N} exhausted at n={row.n}: remainder known only mod "
                f"p^{rem.N}, below the target bound")
        if exhausted:
            rem = remainder_series_value(fam, pt, row.n, N)
        out.append((row.n, rem.vlb))
    return out


# ---------------------------------------------------------------------------
# CSV view
# ---------------------------------------------------------------------------

def rows_to_csv(fam: Family | str, rows: list, valuations: dict | None = None,
                x=None) -> str:
    """Render ConvergentRows as CSV: n, p_n, q_n (exact rational strings),
    remainder valuation when supplied.

    For family III at x = 1/4 an extra column carries the combined
    fractions -(p_n - p_{n-1})/(64 (q_n - q_{n-1})) noted (without proof)
    to equal Calegari's approximations to zeta_2(3); no correctness claim
    is attached to that column.
    """
    fam = get_family(fam) if isinstance(fam, str) else fam
    combined = fam.tag == "III" and x is not None \
        and not isinstance(x, PolyQ) and as_mpq(x) == mpq(1, 4)
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    header = ["n", "p_n", "q_n", "remainder_valuation"]
    if combined:
        header.append("combined_fraction")
    writer.writerow(header)
    prev = None
    for row in rows:
        val = "" if valuations is None or row.n not in valuations \
            else valuations[row.n]
        record = [row.n, str(row.p), str(row.q), val]
        if combined:
            if prev is None or row.q == prev.q:
                record.append("")
            else:
                record.append(str(-(row.p - prev.p) / (64 * (row.q - prev.q))))
            prev = row
        writer.writerow(record)
    return buf.getvalue()
