"""Power-series solution of the parameter-dependent Lyapunov equations.

Substituting ``A(m) = sum A_k m^k`` etc. into ``A W + W A^T + B B^T = 0``
and collecting powers of ``m`` gives one Lyapunov equation per order, all
with the same dynamics matrix ``A_0``::

    A_0 W_r + W_r A_0^T + P_r = 0,
    P_0 = B_0 B_0^T,
    P_r = B_0 B_r^T + sum_{s<r} (A_{r-s} W_s + W_s A_{r-s}^T + B_{r-s} B_s^T).

The observability series is the same recursion applied to the dual system
``(A^T, C^T)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOrder, NotPositiveDefinite, NotSymmetric
from .linalg import LyapunovSolver, cholesky, is_symmetric
from .series import MatrixSeries
from .tolerances import DEFAULT

__all__ = [
    "GramianSeries",
    "controllability_series",
    "observability_series",
    "gramian_rhs",
    "power_residuals",
]


@dataclass(frozen=True, eq=False)
class GramianSeries:
    kind: str
    W: MatrixSeries

    @property
    def order(self):
        return self.W.order

    def __getitem__(self, k):
        return self.W[k]


def gramian_rhs(A, B, W, r):
    """Effective input term ``P_r`` for order ``r >= 1``.

    ``W`` holds the already computed ``W_0 .. W_{r-1}``. No symmetrization is
    applied; symmetry has to come out of the full sum.
    """
    P = B[0] @ B[r].T
    for s in range(r):
        P = P + A[r - s] @ W[s] + W[s] @ A[r - s].T + B[r - s] @ B[s].T
    return P


def _recursion(A, B, order, tol, kind):
    if order > min(A.order, B.order):
        raise InsufficientOrder(
            f"Gramian order {order} exceeds system series order {A.order}")
    solver = LyapunovSolver(A[0], tol)
    W = [solver.solve(B[0] @ B[0].T)]
    try:
        cholesky(W[0], tol.symmetry)
    except NotPositiveDefinite:
        raise NotPositiveDefinite(
            f"{kind} Gramian W_0 is not positive definite; A_0 is not Hurwitz "
            "or the system is not minimal") from None
    for r in range(1, order + 1):
        P = gramian_rhs(A, B, W, r)
        if not is_symmetric(P, tol.symmetry):
            raise NotSymmetric(f"{kind} right-hand side at order {r} is not symmetric")
        W.append(solver.solve(P))
    return MatrixSeries(W)


def controllability_series(sys, order, tol=DEFAULT):
    """Series of the controllability Gramian ``W^c(m)`` up to ``order``."""
    W = _recursion(sys.A, sys.B, order, tol, "controllability")
    return GramianSeries("controllability", W)


def observability_series(sys, order, tol=DEFAULT):
    """Series of the observability Gramian ``W^o(m)`` up to ``order``."""
    W = _recursion(sys.A.T, sys.C.T, order, tol, "observability")
    return GramianSeries("observability", W)


def power_residuals(sys, gramian):
    """Scaled residual of each collected power of the Lyapunov equation.

    For the controllability Gramian, entry ``r`` is the norm of
    ``sum_{s<=r} (A_{r-s} W_s + W_s A_{r-s}^T + B_{r-s} B_s^T)`` divided by
    the sum of the norms of its terms.
    """
    if gramian.kind == "controllability":
        A, B = sys.A, sys.B
    else:
        A, B = sys.A.T, sys.C.T
    W = gramian.W
    out = []
    for r in range(W.order + 1):
        total = np.zeros_like(W[0])
        scale = 0.0
        for s in range(r + 1):
            terms = (A[r - s] @ W[s], W[s] @ A[r - s].T, B[r - s] @ B[s].T)
            for t in terms:
                total += t
                scale += np.linalg.norm(t)
        out.append(np.linalg.norm(total) / scale if scale > 0 else 0.0)
    return out
