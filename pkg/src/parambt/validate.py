"""Invariant checks over a finished pipeline run.

Each check compares stored stage inputs with stored stage outputs, so
corrupting one object after the fact (see :func:`inject_fault`) makes the
checks downstream of it fail with the right stage name.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .gramians import power_residuals
from .linalg import LyapunovSolver, cholesky, is_symmetric
from .oracle import balance_exact, sign_alignment
from .series import MatrixSeries, series_eval, series_product
from .svd_perturb import sigma2_relative_gap
from .tolerances import DEFAULT

__all__ = ["Check", "ValidationReport", "validate_pipeline", "inject_fault",
           "FAULT_TARGETS", "REPORT_SCHEMA"]

REPORT_SCHEMA = "parambt-validate/1"
HALVING_VALUES = (0.08, 0.04, 0.02)
FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-3
FD_TOL_FIRST = 1e-6
FD_TOL_SECOND = 1e-4
BALANCED_GRAMIAN_TOL = 1e-8

PASS, FAIL, NA = "pass", "fail", "not_applicable"


@dataclass
class Check:
    name: str
    stage: str
    status: str
    value: float = float("nan")
    tol: float = float("nan")
    detail: str = ""

    def to_dict(self):
        def clean(x):
            return None if x is None or not np.isfinite(x) else float(x)
        return {"name": self.name, "stage": self.stage, "status": self.status,
                "value": clean(self.value), "tol": clean(self.tol),
                "detail": self.detail}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    @property
    def first_failure_stage(self):
        f = self.failures
        return f[0].stage if f else None

    def by_name(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed_stages(self):
        return sorted({c.stage for c in self.failures})

    def to_dict(self):
        return {"schema": REPORT_SCHEMA, "ok": self.ok,
                "first_failure_stage": self.first_failure_stage,
                "checks": [c.to_dict() for c in self.checks]}


def _bound(report, name, stage, value, tol, detail=""):
    ok = bool(np.isfinite(value) and value <= tol)
    report.checks.append(Check(name, stage, PASS if ok else FAIL, value, tol, detail))


def _na(report, name, stage, detail="order too low"):
    report.checks.append(Check(name, stage, NA, detail=detail))


def _coeff_error(P, Q, scale=None, order=None):
    """Largest coefficient gap ``||P_k - Q_k||`` relative to ``scale``."""
    K = min(P.order, Q.order) if order is None else order
    if scale is None:
        scale = max(np.linalg.norm(c) for c in Q.coeffs[: K + 1])
    scale = scale if scale > 0 else 1.0
    return max(np.linalg.norm(P[k] - Q[k]) for k in range(K + 1)) / scale


def _identity_error(P, Q, K):
    """Largest gap between the coefficients of ``P Q`` and the identity series.

    Coefficient ``k`` is a sum of products ``P_{k-s} Q_s``; its gap is taken
    relative to ``max(1, sum_s ||P_{k-s}|| ||Q_s||)``, the size of the terms
    that cancel, which is what bounds its rounding error.
    """
    prod = series_product(P, Q, K)
    eye = np.eye(prod.shape[0])
    worst = 0.0
    for k in range(K + 1):
        terms = sum(np.linalg.norm(P[k - s]) * np.linalg.norm(Q[s]) for s in range(k + 1))
        gap = np.linalg.norm(prod[k] - (eye if k == 0 else 0.0))
        worst = max(worst, gap / max(1.0, terms))
    return worst


def _congruence_error(P, W, target, floor, K):
    """Largest coefficient gap between ``P W P^T`` and ``target``, each taken
    relative to ``max(floor, sum_{a+b+c=k} ||P_a|| ||W_b|| ||P_c||)``."""
    prod = series_product(series_product(P, W, K), P.T, K)
    norms_p = [np.linalg.norm(P[k]) for k in range(K + 1)]
    norms_w = [np.linalg.norm(W[k]) for k in range(K + 1)]
    worst = 0.0
    for k in range(K + 1):
        terms = sum(norms_p[a] * norms_w[b] * norms_p[k - a - b]
                    for a in range(k + 1) for b in range(k - a + 1))
        gap = np.linalg.norm(prod[k] - target[k])
        worst = max(worst, gap / max(floor, terms))
    return worst


def _check_gramians(report, res, tol):
    for gs, label in ((res.Wc, "c"), (res.Wo, "o")):
        resid = max(power_residuals(res.system, gs))
        _bound(report, f"gramian_{label}.lyapunov_residual", "gramians", resid,
               tol.lyapunov_residual)
        sym = all(is_symmetric(W, tol.symmetry) for W in gs.W)
        report.checks.append(Check(f"gramian_{label}.symmetric", "gramians",
                                   PASS if sym else FAIL))
        try:
            cholesky(gs.W[0], tol.symmetry)
            status = PASS
        except NumericalError:
            status = FAIL
        report.checks.append(Check(f"gramian_{label}.positive_definite", "gramians",
                                   status))


def _check_factors(report, res, tol):
    for F, gs, label in ((res.X, res.Wc, "X"), (res.Y, res.Wo, "Y")):
        recon = series_product(F.X, F.X.T, F.order)
        _bound(report, f"factor_{label}.reconstruction", "factors",
               _coeff_error(recon, gs.W), tol.coefficient_check)
        X0 = F.X[0]
        lower = np.linalg.norm(np.triu(X0, 1)) == 0 and np.all(np.diag(X0) > 0)
        report.checks.append(Check(f"factor_{label}.lower_triangular_0", "factors",
                                   PASS if lower else FAIL))
        if F.order >= 1:
            sym = max(np.linalg.norm(F.X[k] - F.X[k].T) / max(np.linalg.norm(F.X[k]), 1e-300)
                      for k in range(1, F.order + 1))
            _bound(report, f"factor_{label}.symmetric_higher", "factors", sym,
                   tol.symmetry)
        else:
            _na(report, f"factor_{label}.symmetric_higher", "factors")


def _check_svd(report, res, tol):
    svd = res.svd
    R = res.R.R
    K = svd.order
    U, V, Sig = svd.U, svd.V, svd.Sigma
    r0 = np.linalg.norm(R[0])
    s0 = svd.sigma(0)
    desc = bool(np.all(s0 > 0) and np.all(np.diff(s0) < 0))
    report.checks.append(Check("svd.sigma_descending", "svd", PASS if desc else FAIL))
    _bound(report, "svd.orthogonality_U", "svd", _identity_error(U.T, U, K),
           tol.coefficient_check)
    _bound(report, "svd.orthogonality_V", "svd", _identity_error(V.T, V, K),
           tol.coefficient_check)
    recon = series_product(series_product(U, Sig, K), V.T, K)
    _bound(report, "svd.reconstruction", "svd",
           _coeff_error(recon, R, scale=r0, order=K), tol.coefficient_check)
    eig = max(np.linalg.norm(R[0] @ R[0].T @ U[0][:, i] - s0[i] ** 2 * U[0][:, i])
              for i in range(len(s0))) / r0 ** 2
    _bound(report, "svd.eigen_relation_0", "svd", eig, tol.coefficient_check)

    # order-collected column relations R v = sigma u and R^T u = sigma v
    worst = 0.0
    for k in range(K + 1):
        lhs_a = sum(R[k - s] @ V[s] for s in range(k + 1))
        rhs_a = sum(U[k - s] @ Sig[s] for s in range(k + 1))
        lhs_b = sum(R[k - s].T @ U[s] for s in range(k + 1))
        rhs_b = sum(V[k - s] @ Sig[s] for s in range(k + 1))
        worst = max(worst, np.linalg.norm(lhs_a - rhs_a), np.linalg.norm(lhs_b - rhs_b))
    _bound(report, "svd.column_relations", "svd", worst / r0, tol.coefficient_check)

    if K >= 1:
        n1 = np.max(np.abs(np.sum(U[1] * U[0], axis=0)))
        n1v = np.max(np.abs(np.sum(V[1] * V[0], axis=0)))
        _bound(report, "svd.normalization_1", "svd", max(n1, n1v), tol.coefficient_check)
    else:
        _na(report, "svd.normalization_1", "svd")
    if K >= 2:
        n2 = np.sum(U[2] * U[0], axis=0) + 0.5 * np.sum(U[1] ** 2, axis=0)
        n2v = np.sum(V[2] * V[0], axis=0) + 0.5 * np.sum(V[1] ** 2, axis=0)
        _bound(report, "svd.normalization_2", "svd",
               max(np.max(np.abs(n2)), np.max(np.abs(n2v))), tol.coefficient_check)
        s2 = svd.sigma(2)
        cross = max(sigma2_relative_gap(a, b, f)
                    for a, b, f in zip(s2, svd.sigma2_alt, svd.sigma2_floor))
        _bound(report, "svd.sigma2_crosscheck", "svd", cross, tol.sigma2_crosscheck)
    else:
        _na(report, "svd.normalization_2", "svd")
        _na(report, "svd.sigma2_crosscheck", "svd")


def _check_balancing(report, res, tol):
    bal = res.balanced
    K = bal.order
    S = res.S.S
    _bound(report, "balancing.inv_sqrt_identity", "balancing",
           _identity_error(series_product(S, S, K), res.svd.Sigma, K),
           tol.coefficient_check)
    _bound(report, "balancing.T_Tinv_identity", "balancing",
           _identity_error(bal.Tinv, bal.T, K), tol.coefficient_check)
    sig_scale = res.svd.sigma(0)[0]
    err = max(_congruence_error(bal.Tinv, res.Wc.W, res.svd.Sigma, sig_scale, K),
              _congruence_error(bal.T.T, res.Wo.W, res.svd.Sigma, sig_scale, K))
    _bound(report, "balancing.balanced_gramians", "balancing", err, BALANCED_GRAMIAN_TOL)
    # independent order-0 check: fresh Lyapunov solves on the balanced system
    A0, B0, C0 = bal.A[0], bal.B[0], bal.C[0]
    try:
        wc0 = LyapunovSolver(A0, tol).solve(B0 @ B0.T)
        wo0 = LyapunovSolver(A0.T, tol).solve(C0.T @ C0)
        target = np.diag(res.svd.sigma(0))
        err0 = max(np.linalg.norm(wc0 - target), np.linalg.norm(wo0 - target)) / sig_scale
    except NumericalError:
        err0 = float("inf")
    _bound(report, "balancing.balanced_gramians_0_resolved", "balancing", err0,
           BALANCED_GRAMIAN_TOL)


def _fd_relerr(a, b, floor):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def _check_finite_differences(report, res, exact, tol):
    K = res.order
    s0 = res.svd.sigma(0)

    def hsv(m):
        return balance_exact(exact(m), tol).sigma

    if K >= 1:
        h = FD_STEP_FIRST
        fd = (hsv(h) - hsv(-h)) / (2 * h)
        err = _fd_relerr(res.svd.sigma(1), fd, 1e-8 * s0)
        _bound(report, "fd.sigma_first", "svd", float(err.max()), FD_TOL_FIRST)
    else:
        _na(report, "fd.sigma_first", "svd")
    if K >= 2:
        h = FD_STEP_SECOND
        fd = (hsv(h) - 2 * hsv(0.0) + hsv(-h)) / (2 * h * h)
        err = _fd_relerr(res.svd.sigma(2), fd, 1e-6 * s0)
        _bound(report, "fd.sigma_second", "svd", float(err.max()), FD_TOL_SECOND)
    else:
        _na(report, "fd.sigma_second", "svd")


def halving_errors(res, exact, values=HALVING_VALUES, tol=DEFAULT):
    """Errors of the series objects against exact values at each ``m``.

    Returns a dict with keys ``"R"``, ``"Wc"`` and ``"Atil"``, each a list
    aligned with ``values``.
    """
    svd = res.svd
    T0 = None
    out = {"R": [], "Wc": [], "Atil": []}
    for m in values:
        Rm = series_eval(res.R.R, m)
        usv = series_eval(svd.U, m) @ series_eval(svd.Sigma, m) @ series_eval(svd.V, m).T
        out["R"].append(float(np.linalg.norm(Rm - usv)))
        ex = balance_exact(exact(m), tol)
        out["Wc"].append(float(np.linalg.norm(series_eval(res.Wc.W, m) - ex.Wc)))
        T0 = series_eval(res.balanced.T, m)
        ex = ex.flipped(sign_alignment(T0, ex.T))
        out["Atil"].append(float(np.linalg.norm(series_eval(res.balanced.A, m) - ex.A)))
    return out


def halving_ratios(errors):
    return {k: [v[i] / v[i + 1] if v[i + 1] > 0 else float("inf")
                for i in range(len(v) - 1)] for k, v in errors.items()}


def _check_convergence(report, res, exact, tol):
    K = res.order
    expected = 2.0 ** (K + 1)
    lo, hi = 0.75 * expected, 1.25 * expected
    errors = halving_errors(res, exact, tol=tol)
    ratios = halving_ratios(errors)
    for key, rs in ratios.items():
        name = f"convergence.{key}"
        if key == "R" and K == 0:
            _na(report, name, "svd", "series SVD is exact at order 0")
            continue
        stage = {"R": "svd", "Wc": "gramians", "Atil": "balancing"}[key]
        ok = all(lo <= r <= hi for r in rs)
        detail = "ratios " + ", ".join(f"{r:.3f}" for r in rs) + f" expected [{lo}, {hi}]"
        report.checks.append(Check(name, stage, PASS if ok else FAIL,
                                   float(min(rs)), lo, detail))


def validate_pipeline(res, exact=None, tol=DEFAULT):
    """Run every invariant check on ``res``.

    Parameters
    ----------
    res : PipelineResult
    exact : callable, optional
        ``m -> NumericLTI`` giving the true system at a numeric parameter
        value. Enables the finite-difference and halving-ratio checks.
    """
    report = ValidationReport()
    _check_gramians(report, res, tol)
    _check_factors(report, res, tol)
    _check_svd(report, res, tol)
    _check_balancing(report, res, tol)
    if exact is not None:
        _check_finite_differences(report, res, exact, tol)
        _check_convergence(report, res, exact, tol)
    else:
        for name, stage in (("fd.sigma_first", "svd"), ("fd.sigma_second", "svd")):
            _na(report, name, stage, "no exact model supplied")
    return report


#: fault target -> which pipeline object gets corrupted
FAULT_TARGETS = ("R1", "Wc1", "Wo0", "X1", "T1", "Tinv0")


def _bump(series, k, delta, symmetric=False):
    coeffs = [np.array(c) for c in series]
    if k > series.order:
        k = series.order
    scale = max(np.linalg.norm(c) for c in coeffs)
    coeffs[k][0, 0] += delta * scale
    if symmetric and coeffs[k].shape[0] > 1:
        coeffs[k][1, 0] += delta * scale
        coeffs[k][0, 1] += delta * scale
    return MatrixSeries(coeffs)


def inject_fault(res, target, delta=1e-6):
    """Return a copy of ``res`` with one stored coefficient perturbed."""
    from .balancing import BalancedSeries
    from .factors import FactorSeries, ProductSeries
    from .gramians import GramianSeries

    if target == "R1":
        return res.replace(R=ProductSeries(_bump(res.R.R, 1, delta)))
    if target == "Wc1":
        return res.replace(Wc=GramianSeries("controllability",
                                            _bump(res.Wc.W, 1, delta, symmetric=True)))
    if target == "Wo0":
        return res.replace(Wo=GramianSeries("observability",
                                            _bump(res.Wo.W, 0, delta, symmetric=True)))
    if target == "X1":
        return res.replace(X=FactorSeries(_bump(res.X.X, 1, delta, symmetric=True),
                                          res.X.kind))
    b = res.balanced
    if target == "T1":
        return res.replace(balanced=BalancedSeries(_bump(b.T, 1, delta), b.Tinv, b.A,
                                                   b.B, b.C, b.Sigma))
    if target == "Tinv0":
        return res.replace(balanced=BalancedSeries(b.T, _bump(b.Tinv, 0, delta), b.A,
                                                   b.B, b.C, b.Sigma))
    raise KeyError(f"unknown fault target {target!r}; choose from {FAULT_TARGETS}")
