"""Series square-root factors of the Gramians and the product ``Y^T X``.

``W(m) = X(m) X(m)^T`` is solved order by order. ``X_0`` is the Cholesky
factor of ``W_0``. For ``k >= 1`` the coefficient ``X_k`` is taken
symmetric, which turns the order-``k`` equation into the Lyapunov-type
equation::

    X_0 X_k + X_k X_0^T = W_k - sum_{s=1}^{k-1} X_{k-s} X_s^T.

Its skew-symmetric counterpart only has the zero solution because the
spectrum of ``X_0`` (its Cholesky diagonal) is strictly positive, so the
skew part is never computed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOrder, LyapunovSolveFailed, NumericalError
from .linalg import LyapunovSolver, cholesky, symmetrize
from .series import MatrixSeries, series_product
from .tolerances import DEFAULT

__all__ = ["FactorSeries", "ProductSeries", "factor_series", "product_series",
           "factor_rhs"]


@dataclass(frozen=True, eq=False)
class FactorSeries:
    X: MatrixSeries
    kind: str = ""

    @property
    def order(self):
        return self.X.order

    def __getitem__(self, k):
        return self.X[k]


@dataclass(frozen=True, eq=False)
class ProductSeries:
    R: MatrixSeries

    @property
    def order(self):
        return self.R.order

    def __getitem__(self, k):
        return self.R[k]


def factor_rhs(W, X, k):
    """``W_k - sum_{s=1}^{k-1} X_{k-s} X_s^T`` from the factors known so far."""
    rhs = np.array(W[k])
    for s in range(1, k):
        rhs -= X[k - s] @ X[s].T
    return rhs


def factor_series(W, order, tol=DEFAULT):
    """Square-root factor series of a Gramian series.

    Parameters
    ----------
    W : GramianSeries
    order : int

    Returns
    -------
    FactorSeries
        ``X_0`` lower triangular, ``X_k`` symmetric for ``k >= 1``.
    """
    if order > W.order:
        raise InsufficientOrder(f"factor order {order} exceeds Gramian order {W.order}")
    X0 = cholesky(W[0], tol.symmetry)
    # eigenvalues of a triangular matrix are its diagonal
    if not np.all(np.diag(X0) > 0):
        raise LyapunovSolveFailed("X_0 has a non-positive eigenvalue")
    X = [X0]
    if order >= 1:
        try:
            solver = LyapunovSolver(-X0, tol)
        except NumericalError as exc:
            raise LyapunovSolveFailed(str(exc)) from None
        for k in range(1, order + 1):
            rhs = symmetrize(factor_rhs(W, X, k))
            try:
                X.append(solver.solve(rhs))
            except NumericalError as exc:
                raise LyapunovSolveFailed(f"order {k}: {exc}") from None
    return FactorSeries(MatrixSeries(X), getattr(W, "kind", ""))


def product_series(Y, X, order):
    """``R(m) = Y(m)^T X(m)``, i.e. ``R_k = sum_s Y_{k-s}^T X_s``."""
    if order > min(Y.order, X.order):
        raise InsufficientOrder(
            f"product order {order} exceeds factor orders {Y.order}, {X.order}")
    return ProductSeries(series_product(Y.X.T, X.X, order))
