"""Pure numpy fallback for the simplex eta-file kernels.

Same contracts as the compiled module ``_kernels``: product-form eta updates
applied to dense work vectors in place.  Each eta j holds a pivot column
``eta_d[j]`` (the basis-solved entering column) and pivot row ``eta_r[j]``.
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False


def ftran_etas(eta_d: np.ndarray, eta_r: np.ndarray, k: int, w: np.ndarray) -> None:
    """Apply eta inverses in chronological order: w <- E_k^-1 ... E_1^-1 w."""
    for j in range(k):
        r = eta_r[j]
        d = eta_d[j]
        t = w[r] / d[r]
        if t != 0.0:
            w -= d * t
        w[r] = t


def btran_etas(eta_d: np.ndarray, eta_r: np.ndarray, k: int, c: np.ndarray) -> None:
    """Apply transposed eta inverses in reverse order: c <- E_1^-T ... E_k^-T c."""
    for j in range(k - 1, -1, -1):
        r = eta_r[j]
        d = eta_d[j]
        cr = c[r]
        c[r] = cr - (float(d @ c) - cr) / d[r]
