"""Backend selection for the term-sum evaluator.

The compiled extension ``_speedups`` is used when it imports; otherwise the
numpy implementation below is used.  Setting ``HYPHEAT_PURE_PYTHON=1`` forces
the fallback, which is how the two are compared in tests and benchmarks.
"""

from __future__ import annotations

import os

import numpy as np


def eval_terms_numpy(coef, a, b, c, d, r, t):
    """Sum ``coef * r**a * coth(r)**b * csch(r)**c * t**(-d)`` for each ``r``."""
    x = np.asarray(r, dtype=float)[:, None]
    csch = 1.0 / np.sinh(x)
    coth = np.cosh(x) * csch
    mat = x**a * coth**b * csch**c * (1.0 / t) ** d
    return mat @ coef


try:
    if os.environ.get("HYPHEAT_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from ._speedups import eval_terms as _eval_terms_compiled

    BACKEND = "compiled"
except ImportError:
    _eval_terms_compiled = None
    BACKEND = "numpy"


def eval_terms(coef, a, b, c, d, r, t):
    """Dispatch to the active backend.  Arrays must be 1-d and aligned."""
    r = np.ascontiguousarray(r, dtype=np.float64)
    if _eval_terms_compiled is not None:
        return _eval_terms_compiled(coef, a, b, c, d, r, float(t))
    return eval_terms_numpy(coef, a, b, c, d, r, t)
