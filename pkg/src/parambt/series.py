"""Truncated matrix-valued power series in a scalar parameter.

A :class:`MatrixSeries` of order ``K`` stores ``K + 1`` coefficient matrices
``M_0, ..., M_K`` representing ``M(m) = sum_k M_k m^k + O(m^(K+1))``.
Coefficients above the order are *unknown*, not zero, so products cannot be
requested beyond the order of the shorter operand.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOrder, ShapeMismatch, SingularLeadingCoefficient
from .linalg import as_matrix

__all__ = [
    "MatrixSeries",
    "series_product",
    "series_eval",
    "series_inverse",
]


@dataclass(frozen=True, eq=False)
class MatrixSeries:
    coeffs: tuple

    def __init__(self, coeffs):
        mats = []
        for k, c in enumerate(coeffs):
            c = as_matrix(c, f"coefficient {k}").copy()
            c.flags.writeable = False
            mats.append(c)
        if not mats:
            raise ShapeMismatch("a series needs at least one coefficient")
        shape = mats[0].shape
        for k, c in enumerate(mats):
            if c.shape != shape:
                raise ShapeMismatch(
                    f"coefficient {k} has shape {c.shape}, expected {shape}")
        object.__setattr__(self, "coeffs", tuple(mats))

    @classmethod
    def constant(cls, M, order):
        M = as_matrix(M)
        return cls([M] + [np.zeros_like(M)] * order)

    @classmethod
    def zeros(cls, shape, order):
        return cls([np.zeros(shape)] * (order + 1))

    @classmethod
    def identity(cls, n, order):
        return cls.constant(np.eye(n), order)

    @classmethod
    def diagonal(cls, diagonals):
        """Series whose ``k``-th coefficient is ``diag(diagonals[k])``."""
        return cls([np.diag(np.asarray(d, dtype=float)) for d in diagonals])

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def shape(self):
        return self.coeffs[0].shape

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    @property
    def T(self):
        return MatrixSeries([c.T for c in self.coeffs])

    def truncate(self, order):
        if order > self.order:
            raise InsufficientOrder(
                f"cannot truncate order-{self.order} series to order {order}")
        return MatrixSeries(self.coeffs[: order + 1])

    def block(self, rows, cols):
        """Sub-block ``[rows, cols]`` of every coefficient (slices)."""
        return MatrixSeries([c[rows, cols] for c in self.coeffs])

    def map(self, func):
        return MatrixSeries([func(c) for c in self.coeffs])

    def __call__(self, m):
        return series_eval(self, m)

    def _check_same(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeMismatch(f"shapes {self.shape} and {other.shape} differ")
        return min(self.order, other.order)

    def __add__(self, other):
        K = self._check_same(other)
        if K is NotImplemented:
            return K
        return MatrixSeries([self[k] + other[k] for k in range(K + 1)])

    def __sub__(self, other):
        K = self._check_same(other)
        if K is NotImplemented:
            return K
        return MatrixSeries([self[k] - other[k] for k in range(K + 1)])

    def __neg__(self):
        return self.map(lambda c: -c)

    def __mul__(self, scalar):
        if isinstance(scalar, MatrixSeries):
            return NotImplemented
        return self.map(lambda c: scalar * c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return series_product(self, other, min(self.order, other.order))

    def __repr__(self):
        return f"MatrixSeries(order={self.order}, shape={self.shape})"


def series_product(P, Q, order):
    """Cauchy product truncated at ``order``.

    Coefficient ``r`` of the result is ``sum_{s=0}^r P_{r-s} Q_s``.
    """
    if P.shape[1] != Q.shape[0]:
        raise ShapeMismatch(f"cannot multiply {P.shape} by {Q.shape}")
    if order < 0:
        raise InsufficientOrder("order must be non-negative")
    if order > min(P.order, Q.order):
        raise InsufficientOrder(
            f"requested order {order} but operands have orders "
            f"{P.order} and {Q.order}")
    out = []
    for r in range(order + 1):
        acc = np.zeros((P.shape[0], Q.shape[1]))
        for s in range(r + 1):
            acc += P[r - s] @ Q[s]
        out.append(acc)
    return MatrixSeries(out)


def series_eval(P, m):
    """Evaluate ``sum_k P_k m^k`` by Horner's rule."""
    acc = np.array(P[P.order], dtype=float)
    for k in range(P.order - 1, -1, -1):
        acc = acc * m + P[k]
    return acc


def series_inverse(V, order):
    """Series of ``V(m)^{-1}`` up to ``order``.

    Uses ``Vhat_0 = V_0^{-1}`` and
    ``Vhat_k = -V_0^{-1} sum_{s=1}^k V_s Vhat_{k-s}``.
    """
    if V.shape[0] != V.shape[1]:
        raise ShapeMismatch(f"series must be square, got {V.shape}")
    if order > V.order:
        raise InsufficientOrder(f"requested order {order} > series order {V.order}")
    try:
        V0inv = np.linalg.inv(V[0])
    except np.linalg.LinAlgError:
        raise SingularLeadingCoefficient("V_0 is singular") from None
    if np.linalg.cond(V[0]) > 1e14:
        raise SingularLeadingCoefficient("V_0 is numerically singular")
    out = [V0inv]
    for k in range(1, order + 1):
        acc = np.zeros_like(V0inv)
        for s in range(1, k + 1):
            acc += V[s] @ out[k - s]
        out.append(-V0inv @ acc)
    return MatrixSeries(out)
