"""Parameter-dependent LTI systems and the mass-spring chain benchmark."""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NotPositiveDefinite, NumericalError, ShapeMismatch
from .linalg import LyapunovSolver, as_matrix, cholesky
from .series import MatrixSeries, series_eval

__all__ = [
    "NumericLTI",
    "ParametricLTI",
    "MassSpringConfig",
    "build_mass_spring",
    "mass_spring_numeric",
    "StabilityReport",
    "validate_stability",
    "MODEL_SCHEMA",
]

MODEL_SCHEMA = "parametric-lti/1"


@dataclass(frozen=True, eq=False)
class NumericLTI:
    """State-space triple ``(A, B, C)`` at one numeric parameter value."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n) or B.shape[0] != n or C.shape[1] != n:
            raise ShapeMismatch(
                f"inconsistent shapes A{A.shape} B{B.shape} C{C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def inputs(self):
        return self.B.shape[1]

    @property
    def outputs(self):
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class ParametricLTI:
    """``A(m), B(m), C(m)`` given as truncated power series of equal order."""

    A: MatrixSeries
    B: MatrixSeries
    C: MatrixSeries

    def __post_init__(self):
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ShapeMismatch(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n or self.C.shape[1] != n:
            raise ShapeMismatch(
                f"inconsistent shapes A{self.A.shape} B{self.B.shape} C{self.C.shape}")
        if not self.A.order == self.B.order == self.C.order:
            raise ShapeMismatch(
                f"series orders differ: A {self.A.order}, B {self.B.order}, "
                f"C {self.C.order}")

    @property
    def order(self):
        return self.A.order

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def inputs(self):
        return self.B.shape[1]

    @property
    def outputs(self):
        return self.C.shape[0]

    def at(self, m):
        """Evaluate the (truncated) series at ``m``."""
        return NumericLTI(series_eval(self.A, m), series_eval(self.B, m),
                          series_eval(self.C, m))

    def truncate(self, order):
        return ParametricLTI(self.A.truncate(order), self.B.truncate(order),
                             self.C.truncate(order))

    @classmethod
    def from_coefficients(cls, A, B, C):
        return cls(MatrixSeries(A), MatrixSeries(B), MatrixSeries(C))

    def to_dict(self):
        return {
            "schema": MODEL_SCHEMA,
            "order": self.order,
            "dims": {"n": self.n, "m": self.inputs, "p": self.outputs},
            "A": [c.tolist() for c in self.A],
            "B": [c.tolist() for c in self.B],
            "C": [c.tolist() for c in self.C],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            schema = data.get("schema", MODEL_SCHEMA)
            if schema != MODEL_SCHEMA:
                raise ConfigError(f"unsupported model schema {schema!r}")
            sys = cls.from_coefficients(data["A"], data["B"], data["C"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed model: {exc}") from None
        if "order" in data and data["order"] != sys.order:
            raise ConfigError(
                f"declared order {data['order']} but {sys.order + 1} coefficients given")
        dims = data.get("dims")
        if dims is not None:
            actual = {"n": sys.n, "m": sys.inputs, "p": sys.outputs}
            if {k: dims.get(k) for k in actual} != actual:
                raise ConfigError(f"declared dims {dims} do not match {actual}")
        return sys

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)


def _default_stiffness(i):
    return 100.0 * (i + 1)


def _default_damping(i):
    return 1.0


@dataclass(frozen=True)
class MassSpringConfig:
    """Chain of ``N`` masses ``i (1 + m)`` joined by springs to a wall.

    ``stiffness`` and ``damping`` are either callables of the 1-based mass
    index or explicit sequences of length ``N``.
    """

    N: int = 10
    stiffness: object = field(default=_default_stiffness)
    damping: object = field(default=_default_damping)
    order: int = 2

    def constants(self):
        if self.N < 2:
            raise ConfigError(f"need at least two masses, got N={self.N}")
        if self.order < 0:
            raise ConfigError(f"series order must be >= 0, got {self.order}")
        idx = range(1, self.N + 1)

        def resolve(rule, name):
            vals = [rule(i) for i in idx] if callable(rule) else list(rule)
            vals = np.asarray(vals, dtype=float)
            if vals.shape != (self.N,):
                raise ConfigError(f"{name} needs {self.N} values, got {vals.shape}")
            return vals

        k = resolve(self.stiffness, "stiffness")
        gamma = resolve(self.damping, "damping")
        if np.any(k <= 0):
            raise ConfigError("stiffness constants must be positive")
        if np.any(gamma < 0):
            raise ConfigError("damping constants must be non-negative")
        return k, gamma


def stiffness_matrix(k):
    """Tridiagonal spring matrix: spring ``i`` joins masses ``i`` and ``i+1``,
    the last spring joins mass ``N`` to the wall."""
    N = len(k)
    K = np.zeros((N, N))
    for i in range(N):
        K[i, i] = -k[i] - (k[i - 1] if i > 0 else 0.0)
        if i + 1 < N:
            K[i, i + 1] = K[i + 1, i] = k[i]
    return K


def _chain_blocks(k, gamma, inv_mass):
    N = len(k)
    A = np.zeros((2 * N, 2 * N))
    A[:N, N:] = np.diag(inv_mass)
    A[N:, :N] = stiffness_matrix(k)
    A[N:, N:] = -np.diag(gamma * inv_mass)
    return A


def _chain_io(N):
    B = np.zeros((2 * N, 1))
    B[N, 0] = 1.0
    C = np.zeros((1, 2 * N))
    C[0, 0] = 1.0
    return B, C


def build_mass_spring(cfg=MassSpringConfig()):
    """Power-series model of the mass-spring chain.

    State ordering is ``(x_1..x_N, p_1..p_N)`` with ``p_i = m_i x_i'``; the
    force acts on the first mass and the output is ``x_1``. Only the
    ``1/m_i = 1/(i (1+m))`` entries depend on the parameter, and they are
    expanded with ``1/(1+m) = sum_k (-m)^k``.
    """
    k, gamma = cfg.constants()
    N = cfg.N
    K = stiffness_matrix(k)
    base_inv = 1.0 / np.arange(1, N + 1, dtype=float)
    A = []
    for j in range(cfg.order + 1):
        inv_j = (-1.0) ** j * base_inv
        Aj = np.zeros((2 * N, 2 * N))
        Aj[:N, N:] = np.diag(inv_j)
        Aj[N:, N:] = -np.diag(gamma * inv_j)
        if j == 0:
            Aj[N:, :N] = K
        A.append(Aj)
    B, C = _chain_io(N)
    return ParametricLTI(MatrixSeries(A), MatrixSeries.constant(B, cfg.order),
                         MatrixSeries.constant(C, cfg.order))


def mass_spring_numeric(cfg, m):
    """The same chain with masses ``i (1 + m)`` at a numeric ``m`` (no series)."""
    k, gamma = cfg.constants()
    masses = np.arange(1, cfg.N + 1, dtype=float) * (1.0 + m)
    B, C = _chain_io(cfg.N)
    return NumericLTI(_chain_blocks(k, gamma, 1.0 / masses), B, C)


@dataclass
class StabilityReport:
    ok: bool
    controllability: str
    observability: str
    failures: list

    def to_dict(self):
        return {"ok": self.ok, "controllability": self.controllability,
                "observability": self.observability, "failures": self.failures}


def validate_stability(sys):
    """Check that both order-0 Gramians exist and are positive definite.

    A Lyapunov solve failure or an indefinite Gramian is reported rather
    than raised. A positive definite Gramian from a positive semidefinite
    right-hand side is taken as the practical sign of a Hurwitz ``A_0``.
    """
    if isinstance(sys, ParametricLTI):
        sys = sys.at(0.0)
    failures = []
    status = {}
    for kind, A, Q in (("controllability", sys.A, sys.B @ sys.B.T),
                       ("observability", sys.A.T, sys.C.T @ sys.C)):
        try:
            W = LyapunovSolver(A).solve(Q)
        except NumericalError as exc:
            status[kind] = type(exc).__name__
            failures.append(f"{kind}: {type(exc).__name__}: {exc}")
            continue
        try:
            cholesky(W)
        except NotPositiveDefinite:
            status[kind] = "UnstableOrIllConditioned"
            failures.append(f"{kind}: UnstableOrIllConditioned: Gramian is not "
                            "positive definite")
        else:
            status[kind] = "ok"
    return StabilityReport(not failures, status["controllability"],
                           status["observability"], failures)
