"""Balancing transform series, balanced realization series and truncation."""

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrder, NonpositiveSingularValue
from .ltimodel import MODEL_SCHEMA, NumericLTI
from .series import MatrixSeries, series_eval, series_product

__all__ = [
    "InvSqrtSigmaSeries",
    "BalancedSeries",
    "ReducedModel",
    "inv_sqrt_series",
    "transform_series",
    "balanced_series",
    "truncate",
]


@dataclass(frozen=True, eq=False)
class InvSqrtSigmaSeries:
    S: MatrixSeries

    @property
    def order(self):
        return self.S.order


@dataclass(frozen=True, eq=False)
class BalancedSeries:
    T: MatrixSeries
    Tinv: MatrixSeries
    A: MatrixSeries
    B: MatrixSeries
    C: MatrixSeries
    Sigma: MatrixSeries

    @property
    def order(self):
        return self.A.order

    @property
    def n(self):
        return self.A.shape[0]

    def at(self, m):
        return NumericLTI(series_eval(self.A, m), series_eval(self.B, m),
                          series_eval(self.C, m))


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Order-``r`` truncation of a balanced series, evaluable at any ``m``."""

    r: int
    A: MatrixSeries
    B: MatrixSeries
    C: MatrixSeries
    sigma_series: tuple
    sigma_tail: tuple

    @property
    def order(self):
        return self.A.order

    def at(self, m):
        return NumericLTI(series_eval(self.A, m), series_eval(self.B, m),
                          series_eval(self.C, m))

    def with_order(self, order):
        """Same model keeping only the coefficients up to ``order``."""
        return ReducedModel(self.r, self.A.truncate(order), self.B.truncate(order),
                            self.C.truncate(order), self.sigma_series[: order + 1],
                            self.sigma_tail)

    def to_dict(self):
        return {
            "schema": MODEL_SCHEMA,
            "order": self.order,
            "dims": {"n": self.r, "m": self.B.shape[1], "p": self.C.shape[0]},
            "A": [c.tolist() for c in self.A],
            "B": [c.tolist() for c in self.B],
            "C": [c.tolist() for c in self.C],
            "r": self.r,
            "sigma_series": [list(map(float, s)) for s in self.sigma_series],
            "sigma_tail": [float(s) for s in self.sigma_tail],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["r"]), MatrixSeries(data["A"]), MatrixSeries(data["B"]),
                   MatrixSeries(data["C"]),
                   tuple(tuple(s) for s in data["sigma_series"]),
                   tuple(data["sigma_tail"]))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def inv_sqrt_series(Sigma):
    """Diagonal series of ``Sigma(m)^{-1/2}`` from a diagonal ``Sigma`` series.

    Entrywise, with ``s = sigma^(0) + m sigma^(1) + m^2 sigma^(2)``::

        s^(0) = sigma0^(-1/2)
        s^(1) = -sigma1 / (2 sigma0^(3/2))
        s^(2) = -sigma2 / (2 sigma0^(3/2)) + 3 sigma1^2 / (8 sigma0^(5/2))
    """
    if Sigma.order > 2:
        raise InvalidOrder(f"inverse square root implemented to order 2, got {Sigma.order}")
    d = [np.diag(c) for c in Sigma]
    s0 = d[0]
    if np.any(s0 <= 0):
        raise NonpositiveSingularValue("zeroth-order singular values must be positive")
    out = [s0 ** -0.5]
    if Sigma.order >= 1:
        out.append(-d[1] / (2 * s0 ** 1.5))
    if Sigma.order >= 2:
        out.append(-d[2] / (2 * s0 ** 1.5) + 3 * d[1] ** 2 / (8 * s0 ** 2.5))
    return InvSqrtSigmaSeries(MatrixSeries.diagonal(out))


def _chain(*factors, order):
    out = factors[0]
    for f in factors[1:]:
        out = series_product(out, f, order)
    return out


def transform_series(X, Y, svd, S):
    """Series of ``T = X V Sigma^{-1/2}`` and ``T^{-1} = Sigma^{-1/2} U^T Y^T``.

    ``X`` and ``Y`` are the Gramian factor series (or plain
    :class:`MatrixSeries`), ``svd`` the perturbative SVD and ``S`` the
    inverse square root series. All products are truncated at the order of
    ``svd``.
    """
    Xs = getattr(X, "X", X)
    Ys = getattr(Y, "X", Y)
    Ss = getattr(S, "S", S)
    K = svd.order
    T = _chain(Xs, svd.V, Ss, order=K)
    Tinv = _chain(Ss, svd.U.T, Ys.T, order=K)
    return T, Tinv


def balanced_series(sys, T, Tinv, Sigma=None):
    """Balanced realization ``(T^{-1} A T, T^{-1} B, C T)`` as series."""
    K = T.order
    A = _chain(Tinv, sys.A, T, order=K)
    B = series_product(Tinv, sys.B, K)
    C = series_product(sys.C, T, K)
    if Sigma is None:
        Sigma = MatrixSeries.zeros((sys.n, sys.n), K)
    return BalancedSeries(T, Tinv, A, B, C, Sigma)


def truncate(bal, r):
    """Keep the leading ``r`` balanced states (``1 <= r < n``)."""
    n = bal.n
    if not 1 <= r < n:
        raise InvalidOrder(f"reduction order must satisfy 1 <= r < {n}, got {r}")
    keep = slice(0, r)
    sigma = [np.diag(c) for c in bal.Sigma]
    return ReducedModel(
        r,
        bal.A.block(keep, keep),
        bal.B.block(keep, slice(None)),
        bal.C.block(slice(None), keep),
        tuple(tuple(map(float, s)) for s in sigma),
        tuple(map(float, sigma[0][r:])),
    )
