"""Classical balanced truncation of a numeric system.

This is the per-parameter-value ground truth for the series pipeline. It
uses the same kernels but none of the series code.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrder
from .linalg import LyapunovSolver, cholesky, svd_full
from .ltimodel import NumericLTI
from .tolerances import DEFAULT

__all__ = ["ExactBalance", "balance_exact", "reduce_exact", "sign_alignment",
           "hankel_singular_values"]


@dataclass(frozen=True, eq=False)
class ExactBalance:
    T: np.ndarray
    Tinv: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    sigma: np.ndarray
    Wc: np.ndarray
    Wo: np.ndarray

    def system(self):
        return NumericLTI(self.A, self.B, self.C)

    def flipped(self, d):
        """Same realization after the state sign change ``z -> diag(d) z``."""
        D = np.asarray(d, dtype=float)
        return ExactBalance(self.T * D, D[:, None] * self.Tinv,
                            D[:, None] * self.A * D, D[:, None] * self.B,
                            self.C * D, self.sigma, self.Wc, self.Wo)


def balance_exact(sys, tol=DEFAULT):
    """Balanced realization of a stable minimal numeric system.

    Gramians from the two Lyapunov equations, Cholesky factors
    ``W_c = X X^T`` and ``W_o = Y Y^T``, the SVD ``Y^T X = U Sigma V^T``, and
    ``T = X V Sigma^{-1/2}``, ``T^{-1} = Sigma^{-1/2} U^T Y^T``.
    """
    Wc = LyapunovSolver(sys.A, tol).solve(sys.B @ sys.B.T)
    Wo = LyapunovSolver(sys.A.T, tol).solve(sys.C.T @ sys.C)
    X = cholesky(Wc, tol.symmetry)
    Y = cholesky(Wo, tol.symmetry)
    U, sigma, V = svd_full(Y.T @ X, tol.jacobi_tol, tol.jacobi_max_sweeps,
                           tol.svd_floor)
    isq = sigma ** -0.5
    T = X @ V * isq
    Tinv = isq[:, None] * (U.T @ Y.T)
    return ExactBalance(T, Tinv, Tinv @ sys.A @ T, Tinv @ sys.B, sys.C @ T,
                        sigma, Wc, Wo)


def hankel_singular_values(sys, tol=DEFAULT):
    return balance_exact(sys, tol).sigma


def reduce_exact(sys, r, tol=DEFAULT, balanced=None):
    """Balanced truncation to ``r`` states (``r = n`` returns the full
    balanced realization)."""
    if not 1 <= r <= sys.n:
        raise InvalidOrder(f"reduction order must satisfy 1 <= r <= {sys.n}, got {r}")
    bal = balanced if balanced is not None else balance_exact(sys, tol)
    return NumericLTI(bal.A[:r, :r], bal.B[:r], bal.C[:, :r])


def sign_alignment(T_ref, T):
    """Signs ``d`` minimizing ``||T_ref - T diag(d)||``, column by column."""
    dots = np.sum(T_ref * T, axis=0)
    return np.where(dots < 0, -1.0, 1.0)
