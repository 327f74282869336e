"""Exact p-adic L-values via Bernoulli series and Stieltjes-type Pade
convergents, with symbolic identity verification and irrationality
diagnostics."""

from .bernoulli import (SeriesKind, bernoulli, bernoulli_aF, series_laurent,
                        t_number, tangent_numbers)
from .errors import BoundError, PrecisionError, UsageError
from .exact import (LaurentTrunc, PolyQ, QQ, RatFunc, fc_laurent,
                    laurent_scale, laurent_shift, ratfunc_to_laurent)
from .lvalues import (BUILTIN_CHARACTERS, CharacterSpec, EvalPoint,
                      eval_series, eval_series_fc, hurwitz_p, load_characters,
                      lp, verify_all_identities, verify_identity, zeta_p)
from .padic import PadicApprox, ValuationBound, angle, sum_series, teichmuller
from .pade import (ConvergentRow, closed_form_p, closed_form_q, cf_limit,
                   convergent_seq, det_identity, expected_det, get_family,
                   remainder_valuation)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
