"""Second-order perturbation expansion of the SVD of ``R(m) = R_0 + m R_1 + m^2 R_2``.

Writing ``R(m) = U(m) Sigma(m) V(m)^T`` with every factor expanded to
second order, the column relations ``R v_j = sigma_j u_j`` and
``R^T u_j = sigma_j v_j`` collected order by order, together with the
orthonormality of ``U(m)`` and ``V(m)``, give:

* explicit formulas for the singular value corrections ``sigma_j^(1)`` and
  ``sigma_j^(2)``;
* singular linear systems ``(R_0 R_0^T - sigma_j^2 I) u = Q`` for the vector
  corrections, made uniquely solvable by appending the normalization row
  ``u_j^T u = c``. The bordered (N+1) x N system is consistent; it is solved
  in the least-squares sense and the residual is asserted to vanish.

The zeroth singular values must be simple.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CrossCheckFailed,
    DegenerateSingularValues,
    InvalidOrder,
    RankDeficient,
)
from .linalg import solve_linear, svd_full
from .series import MatrixSeries
from .tolerances import DEFAULT

__all__ = [
    "ZerothSVD",
    "SVDPerturbation",
    "svd_series",
    "sigma_first",
    "vector_first",
    "sigma_second",
    "vector_second",
    "bordered_solve",
    "sigma2_relative_gap",
]

MAX_ORDER = 2


@dataclass(frozen=True, eq=False)
class ZerothSVD:
    """SVD of ``R_0`` plus the two Gram products the bordered systems need."""

    R0: np.ndarray
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    RRt: np.ndarray = field(init=False)
    RtR: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "RRt", self.R0 @ self.R0.T)
        object.__setattr__(self, "RtR", self.R0.T @ self.R0)

    @classmethod
    def of(cls, R0, tol=DEFAULT):
        U, sigma, V = svd_full(R0, tol.jacobi_tol, tol.jacobi_max_sweeps, tol.svd_floor)
        return cls(np.asarray(R0, dtype=float), U, sigma, V)

    def u(self, i):
        return self.U[:, i]

    def v(self, i):
        return self.V[:, i]


@dataclass(frozen=True, eq=False)
class SVDPerturbation:
    """Series ``U(m)``, ``Sigma(m)``, ``V(m)`` of order 0, 1 or 2.

    ``sigma2_alt`` holds the second-order singular value corrections from
    the transposed formula and ``sigma2_floor`` their noise level (both empty
    below order 2).
    """

    U: MatrixSeries
    Sigma: MatrixSeries
    V: MatrixSeries
    sigma2_alt: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sigma2_floor: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def order(self):
        return self.U.order

    def sigma(self, k):
        """Vector of the order-``k`` singular value corrections."""
        return np.diag(self.Sigma[k]).copy()


def bordered_solve(G, w0, top, last, tol=DEFAULT):
    """Solve ``[G; w0^T] z = [top; last]`` and assert it is consistent."""
    n = G.shape[0]
    M = np.vstack((G, w0.reshape(1, n)))
    rhs = np.concatenate((top, [last]))
    z = solve_linear(M, rhs, tol.cond_max)
    res = np.linalg.norm(M @ z - rhs)
    scale = np.linalg.norm(M) * np.linalg.norm(z) + np.linalg.norm(rhs)
    if scale > 0 and res > tol.bordered_residual * scale:
        raise RankDeficient(
            f"bordered system is inconsistent (scaled residual {res / scale:.2e})")
    return z


def sigma_first(R1, u0, v0):
    """First-order singular value correction ``<u_0, R_1 v_0>``."""
    return float(u0 @ (R1 @ v0))


def vector_first(i, zeroth, R1, sigma1=None, tol=DEFAULT):
    """First-order corrections ``(u_i^(1), v_i^(1))`` to the singular vectors."""
    u0, v0, s0 = zeroth.u(i), zeroth.v(i), zeroth.sigma[i]
    R0 = zeroth.R0
    if sigma1 is None:
        sigma1 = sigma_first(R1, u0, v0)
    shift = s0 * s0 * np.eye(len(u0))
    Q1 = 2 * s0 * sigma1 * u0 - R0 @ (R1.T @ u0) - s0 * (R1 @ v0)
    P1 = 2 * s0 * sigma1 * v0 - R0.T @ (R1 @ v0) - s0 * (R1.T @ u0)
    u1 = bordered_solve(zeroth.RRt - shift, u0, Q1, 0.0, tol)
    v1 = bordered_solve(zeroth.RtR - shift, v0, P1, 0.0, tol)
    return u1, v1


def _sigma_second_form(s0, a0, b0, a1, b1, R1, R2):
    return 0.5 * s0 * (a1 @ a1 - b1 @ b1) + a0 @ (R1 @ b1 + R2 @ b0)


def sigma2_relative_gap(a, b, floor=0.0):
    """Relative disagreement of the two second-order formulas."""
    scale = max(abs(a), abs(b), floor)
    return abs(a - b) / scale if scale > 0 else 0.0


def _sigma2_floor(s0, u1, v1, R1, R2):
    # noise level of the formulas: only matters when the correction itself
    # cancels to roundoff
    mag = (s0 * (u1 @ u1 + v1 @ v1) + np.linalg.norm(R1) * (np.linalg.norm(u1)
           + np.linalg.norm(v1)) + np.linalg.norm(R2))
    return 1e-12 * mag


def sigma_second(i, zeroth, u1, v1, R1, R2, tol=DEFAULT, return_both=False):
    """Second-order singular value correction.

    Evaluates

        1/2 sigma_0 (|u^(1)|^2 - |v^(1)|^2) + <u_0, R_1 v^(1) + R_2 v_0>

    and the mirror formula obtained by transposing ``R_1, R_2`` and swapping
    the roles of ``u`` and ``v``. The two agree analytically; a relative
    disagreement beyond ``tol.sigma2_crosscheck`` raises
    :class:`CrossCheckFailed`. With ``return_both`` the result is
    ``(value, mirror_value, noise_floor)``.
    """
    u0, v0, s0 = zeroth.u(i), zeroth.v(i), zeroth.sigma[i]
    a = _sigma_second_form(s0, u0, v0, u1, v1, R1, R2)
    b = _sigma_second_form(s0, v0, u0, v1, u1, R1.T, R2.T)
    floor = _sigma2_floor(s0, u1, v1, R1, R2)
    if sigma2_relative_gap(a, b, floor) > tol.sigma2_crosscheck:
        raise CrossCheckFailed(
            f"sigma_{i}^(2) forms disagree: {a:.16e} vs {b:.16e}")
    return (a, b, floor) if return_both else a


def vector_second(i, zeroth, u1, v1, sigma1, sigma2, R1, R2, tol=DEFAULT):
    """Second-order corrections ``(u_i^(2), v_i^(2))`` to the singular vectors."""
    u0, v0, s0 = zeroth.u(i), zeroth.v(i), zeroth.sigma[i]
    R0 = zeroth.R0
    shift = s0 * s0 * np.eye(len(u0))
    Q2 = (-R0 @ (R1.T @ u1) - R0 @ (R2.T @ u0) + s0 * sigma1 * u1
          + sigma1 * (R0 @ v1) + 2 * s0 * sigma2 * u0
          - s0 * (R1 @ v1) - s0 * (R2 @ v0))
    P2 = (-R0.T @ (R1 @ v1) - R0.T @ (R2 @ v0) + s0 * sigma1 * v1
          + sigma1 * (R0.T @ u1) + 2 * s0 * sigma2 * v0
          - s0 * (R1.T @ u1) - s0 * (R2.T @ u0))
    u2 = bordered_solve(zeroth.RRt - shift, u0, Q2, -0.5 * (u1 @ u1), tol)
    v2 = bordered_solve(zeroth.RtR - shift, v0, P2, -0.5 * (v1 @ v1), tol)
    return u2, v2


def check_gaps(sigma, threshold):
    if len(sigma) < 2:
        return
    gaps = (sigma[:-1] - sigma[1:]) / sigma[0]
    j = int(np.argmin(gaps))
    if gaps[j] <= threshold:
        raise DegenerateSingularValues(
            f"sigma_{j} and sigma_{j + 1} are too close "
            f"(relative gap {gaps[j]:.2e} <= {threshold:.1e})")


def svd_series(R, order=None, tol=DEFAULT):
    """Perturbative SVD of a product series ``R`` up to ``order`` (at most 2).

    Parameters
    ----------
    R : ProductSeries or MatrixSeries
    order : int, optional
        Defaults to ``min(R.order, 2)``.
    """
    Rs = getattr(R, "R", R)
    if order is None:
        order = min(Rs.order, MAX_ORDER)
    if not 0 <= order <= MAX_ORDER:
        raise InvalidOrder(f"SVD perturbation supports orders 0..2, got {order}")
    if order > Rs.order:
        raise InvalidOrder(f"order {order} exceeds product series order {Rs.order}")
    zeroth = ZerothSVD.of(Rs[0], tol)
    if order >= 1:
        check_gaps(zeroth.sigma, tol.degeneracy_gap)
    n = len(zeroth.sigma)
    U = [zeroth.U]
    V = [zeroth.V]
    S = [zeroth.sigma]
    alt = floor = np.zeros(0)
    if order >= 1:
        R1 = Rs[1]
        s1 = np.array([sigma_first(R1, zeroth.u(i), zeroth.v(i)) for i in range(n)])
        U1 = np.empty((n, n))
        V1 = np.empty((n, n))
        for i in range(n):
            U1[:, i], V1[:, i] = vector_first(i, zeroth, R1, s1[i], tol)
        U.append(U1)
        V.append(V1)
        S.append(s1)
    if order >= 2:
        R2 = Rs[2]
        s2 = np.empty(n)
        alt = np.empty(n)
        floor = np.empty(n)
        U2 = np.empty((n, n))
        V2 = np.empty((n, n))
        for i in range(n):
            s2[i], alt[i], floor[i] = sigma_second(i, zeroth, U1[:, i], V1[:, i],
                                                   R1, R2, tol, return_both=True)
            U2[:, i], V2[:, i] = vector_second(i, zeroth, U1[:, i], V1[:, i],
                                               s1[i], s2[i], R1, R2, tol)
        U.append(U2)
        V.append(V2)
        S.append(s2)
    return SVDPerturbation(MatrixSeries(U), MatrixSeries.diagonal(S), MatrixSeries(V),
                           alt, floor)
