"""Irrationality machinery: denominator bookkeeping, conditions (A)/(B)/(C),
the corollary routing table, and the approximation-gap diagnostic.

The conditions compare transcendental log expressions, so those two sides
are evaluated with outward-rounded interval arithmetic (mpmath.iv) at a
configurable number of decimal digits; everything else in this module is
exact integer/rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from gmpy2 import lcm as _lcm, mpq, mpz

from .errors import PrecisionError, UsageError
from .lvalues import EvalPoint
from .padic import _require_prime, vp_int
from .pade import cf_limit, convergent_seq, get_family, remainder_valuation


def factorize(n: int) -> dict:
    """Prime factorization by trial division (inputs here are small)."""
    if n < 1:
        raise UsageError("factorize requires n >= 1")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mu_F(n: int, F: int):
    """mu_n(F) = F^n * prod_{q | F} q^[n/(q-1)]; the denominator bound for
    (a/F)_n / n!."""
    if n < 0:
        raise UsageError("mu_F requires n >= 0")
    if F <= 1:
        raise UsageError("mu_F requires F > 1")
    out = mpz(F) ** n
    for q in factorize(F):
        out *= mpz(q) ** (n // (q - 1))
    return out


def lcm_upto(n: int):
    """lcm(1, 2, ..., n), exactly (lcm of the empty range is 1)."""
    out = mpz(1)
    for i in range(2, n + 1):
        out = _lcm(out, i)
    return out


def pochhammer_denominator_check(a: int, F: int, n_max: int) -> dict:
    """Audit of the Pochhammer denominator lemma for beta = a/F:

    * the denominator of (beta)_n / n! divides mu_n(F), and
    * for each p | F its p-count is at least n(r + 1/(p-1)) - log_p n - 1.
    """
    beta = mpq(a, F)
    if beta.denominator == 1:
        raise UsageError("pochhammer check needs a genuine denominator F > 1")
    F_red = int(beta.denominator)
    rows = []
    poch = mpq(1)
    fact = mpz(1)
    all_ok = True
    for n in range(n_max + 1):
        if n > 0:
            poch *= beta + (n - 1)
            fact *= n
        val = poch / fact
        den = val.denominator
        divides = mu_F(n, F_red) % den == 0 if n > 0 else den == 1
        pcount_ok = True
        for p, r in factorize(F_red).items():
            need = n * (r + 1.0 / (p - 1)) - (math.log(n) / math.log(p) if n > 1 else 0) - 1
            if vp_int(den, p) < need - 1e-9:
                pcount_ok = False
        ok = divides and pcount_ok
        all_ok = all_ok and ok
        rows.append({"n": n, "denominator_divides_mu": bool(divides),
                     "p_count_bound_met": bool(pcount_ok)})
    return {"beta": f"{beta}", "F": F_red, "rows": rows, "all_ok": all_ok}


# ---------------------------------------------------------------------------
# conditions (A), (B), (C)
# ---------------------------------------------------------------------------

_CONDITION_CONSTANT = {"A": mpq(1), "B": mpq(2), "C": mpq(3, 2)}


@dataclass(frozen=True)
class ConditionReport:
    which: str
    p: int
    F: int
    r: int
    lhs: str        # decimal interval midpoints at the working precision
    rhs: str
    verdict: str    # holds | fails | too-close
    margin: float   # rhs - lhs midpoint estimate
    digits: int

    def to_dict(self):
        return {"which": self.which, "p": self.p, "F": self.F, "r": self.r,
                "lhs": self.lhs, "rhs": self.rhs, "verdict": self.verdict,
                "margin": self.margin, "digits": self.digits}


def condition(which: str, p: int, F: int, digits: int = 50) -> ConditionReport:
    """Evaluate   log F + sum_{q|F} log q/(q-1) + c  <  2r log p + 2 log p/(p-1)
    with c = 1 (A), 2 (B), 3/2 (C), using rigorous interval logs.

    The verdict is 'too-close' when the two intervals overlap at the working
    precision; the published cases are all decisively separated.
    """
    which = which.upper()
    if which not in _CONDITION_CONSTANT:
        raise UsageError("condition must be one of A, B, C")
    p = _require_prime(p)
    if F % p != 0:
        raise UsageError(f"condition requires p | F (got p={p}, F={F})")
    r = vp_int(F, p)
    iv = mpmath.iv
    old = iv.dps
    try:
        iv.dps = digits + 10
        c = _CONDITION_CONSTANT[which]
        lhs = iv.log(iv.mpf(F)) + iv.mpf(c.numerator) / iv.mpf(c.denominator)
        for q in factorize(F):
            lhs += iv.log(iv.mpf(q)) / iv.mpf(q - 1)
        rhs = 2 * r * iv.log(iv.mpf(p)) + 2 * iv.log(iv.mpf(p)) / iv.mpf(p - 1)
        if lhs.b < rhs.a:
            verdict = "holds"
        elif lhs.a > rhs.b:
            verdict = "fails"
        else:
            verdict = "too-close"
        with mpmath.workdps(digits + 10):
            margin = float(mpmath.mpf(rhs.mid) - mpmath.mpf(lhs.mid))
            lhs_s = mpmath.nstr(mpmath.mpf(lhs.mid), digits)
            rhs_s = mpmath.nstr(mpmath.mpf(rhs.mid), digits)
    finally:
        iv.dps = old
    return ConditionReport(which, p, F, r, lhs_s, rhs_s, verdict, margin, digits)


def condition_stable(which: str, p: int, F: int, digits: int = 50) -> ConditionReport:
    """Condition verdict plus a stability check: recompute at doubled
    precision and require the same verdict."""
    rep = condition(which, p, F, digits)
    rep2 = condition(which, p, F, 2 * digits)
    if rep.verdict != rep2.verdict:
        raise PrecisionError(
            f"condition {which} at (p={p}, F={F}) flipped verdict under "
            f"precision doubling: {rep.verdict} vs {rep2.verdict}")
    return rep2


# ---------------------------------------------------------------------------
# corollary routing
# ---------------------------------------------------------------------------

def _prime_powers(limit: int) -> list:
    out = []
    for f in range(2, limit + 1):
        fac = factorize(f)
        if len(fac) == 1:
            out.append((next(iter(fac)), f))
    return out


def corollary_table(limit: int = 64, digits: int = 50) -> dict:
    """Evaluate the conditions behind each irrationality corollary and emit
    which L-values are certified by which condition at which (p, F).

    Special routes recorded explicitly:
    * F = 2 under (B): H_2(2,1,2) = 0 exactly (no irrationality claim);
    * F = 3 under (B): condition fails, but H_3(2,1,3) = H_3(2,2,3)
      = zeta_3(2)/2 inherits irrationality from zeta_3(2) (condition (A));
      the corollary's printed statement 'every F != 2' relies on this
      routing, which its proof only gives for prime powers > 3.
    """
    table = {"A": [], "B": [], "C": [], "certified": [], "routes": []}

    a_cases = [
        (2, 2, "Theta_2(1/2) = -8 zeta_2(2)", "zeta_2(2)"),
        (2, 4, "Theta_2(1/4) = -16 L_2(2,chi8)", "L_2(2,chi8)"),
        (3, 3, "Theta_3(1/3) = -27/2 zeta_3(2)", "zeta_3(2)"),
        (3, 6, "Theta_3(1/6) = -36 L_3(2,chi12)", None),
    ]
    for p, F, ident, target in a_cases:
        rep = condition_stable("A", p, F, digits)
        table["A"].append(rep.to_dict())
        if rep.verdict == "holds" and target:
            table["certified"].append(
                {"value": target, "condition": "A", "p": p, "F": F,
                 "via": ident})
        elif target is None and rep.verdict != "holds":
            table["routes"].append(
                {"value": "L_3(2,chi12)", "status": "not certified",
                 "reason": "condition (A) fails at (3,6)"})

    for p, F in _prime_powers(limit):
        rep = condition_stable("B", p, F, digits)
        table["B"].append(rep.to_dict())
        if rep.verdict == "holds":
            table["certified"].append(
                {"value": f"omega(a)^-1 H_{p}(2,a,{F}) for p∤a",
                 "condition": "B", "p": p, "F": F})
    table["routes"].append(
        {"value": "H_2(2,1,2)", "status": "rational",
         "reason": "R(x)+R(1-x)=0 forces H_2(2,1,2)=0; (B) fails at F=2"})
    table["routes"].append(
        {"value": "H_3(2,a,3)", "status": "irrational via zeta_3(2)",
         "reason": "(B) fails at F=3; H_3(2,1,3)=H_3(2,2,3)=zeta_3(2)/2 and "
                   "zeta_3(2) is irrational by (A) at (3,3)",
         "statement_proof_mismatch":
             "corollary text claims every prime power F != 2; its proof "
             "checks (B) only for F > 3 and routes F = 3 through zeta_3(2)"})

    c_values = {(2, 4): ["zeta_2(3)"],
                (3, 3): ["zeta_3(3)"],
                (5, 5): ["zeta_5(3)-L_5(3,chi5)", "zeta_5(3)+L_5(3,chi5)"],
                (2, 8): ["zeta_2(3)-L_2(3,chi8)", "zeta_2(3)+L_2(3,chi8)"]}
    for p, F in _prime_powers(limit):
        rep = condition_stable("C", p, F, digits)
        table["C"].append(rep.to_dict())
        if rep.verdict == "holds":
            for value in c_values.get((p, F), []):
                table["certified"].append(
                    {"value": value, "condition": "C", "p": p, "F": F})
            if (p, F) not in c_values:
                table["certified"].append(
                    {"value": f"omega(a)^-2 H_{p}(3,a,{F}) for p∤a",
                     "condition": "C", "p": p, "F": F})
    return table


# ---------------------------------------------------------------------------
# denominator audits and the gap diagnostic
# ---------------------------------------------------------------------------

def denominator_audit(fam, a: int, F: int, n_max: int) -> dict:
    """Check Q_n p_n(a/F), Q_n q_n(a/F) integral for n <= n_max, with the
    family-specific Q_n = lcm(1..n)^lcm_exp * mu_F(n)^mu_exp."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    if fam.tag == "IV":
        raise UsageError("no published denominator claims for family IV")
    rows = convergent_seq(fam, mpq(a, F), n_max)
    lcm_val = mpz(1)
    report = []
    all_ok = True
    for row in rows:
        if row.n >= 2:
            lcm_val = _lcm(lcm_val, row.n)
        mu = mu_F(row.n, F)
        q_budget = mu ** fam.mu_exp
        p_budget = lcm_val ** fam.lcm_exp * mu ** fam.mu_exp
        q_ok = (q_budget * row.q).denominator == 1
        p_ok = (p_budget * row.p).denominator == 1
        all_ok = all_ok and q_ok and p_ok
        report.append({"n": row.n, "q_integral": bool(q_ok),
                       "p_integral": bool(p_ok)})
    return {"family": fam.tag, "a": a, "F": F, "rows": report,
            "all_ok": all_ok}


def _ln_abs(q) -> float:
    """log |q| for an mpq of arbitrary size; -inf for 0."""
    q = mpq(q)
    if q == 0:
        return float("-inf")
    num, den = abs(q.numerator), q.denominator
    return float(mpmath.log(mpmath.mpf(num)) - mpmath.log(mpmath.mpf(den)))


def gap_diagnostic(fam, pt: EvalPoint, N: int, n_max: int,
                   tail_window: int = 25) -> dict:
    """Per-n value of  log max(|Q_n p_n|, |Q_n q_n|) + log |Q_n (p_n - q_n alpha)|_p
    where alpha is the family's p-adic limit and Q_n the clearing factor of
    the irrationality theorems.

    Under the matching condition the table must trend to -inf.  Exact p-adic
    valuations fluctuate by a few digits row to row, so consecutive-row
    monotonicity is false even when the limit statement holds; the report
    instead asserts strict decrease at half-window lag over the last
    `tail_window` rows (every row below the row lag positions earlier), a
    jitter-tolerant but still falsifiable proxy: the condition-failing
    points flag immediately."""
    fam = get_family(fam) if isinstance(fam, str) else fam
    if fam.tag == "IV":
        raise UsageError("gap diagnostic is defined for families I-III")
    p = pt.p
    rows = convergent_seq(fam, pt.x, n_max)
    vals = dict(remainder_valuation(fam, pt, N, n_max))
    lnp = math.log(p)
    lcm_val = mpz(1)
    out = []
    exhausted = []
    for row in rows:
        if row.n >= 2:
            lcm_val = _lcm(lcm_val, row.n)
        Q = lcm_val ** fam.lcm_exp * mu_F(row.n, pt.F) ** fam.mu_exp
        arch = max(_ln_abs(Q * row.p), _ln_abs(Q * row.q))
        padic_log = -(vp_int(Q, p) + vals[row.n]) * lnp
        out.append((row.n, arch + padic_log))
    window = [g for _, g in out[-tail_window:]]
    lag = max(1, len(window) // 2)
    decreasing = all(window[i] < window[i - lag]
                     for i in range(lag, len(window)))
    return {"family": fam.tag, "point": str(pt), "N": N,
            "rows": out, "tail_window": min(tail_window, len(out)),
            "tail_lag": lag,
            "tail_monotone_decreasing": bool(decreasing)}
