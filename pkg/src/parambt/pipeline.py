"""End-to-end parametric balanced truncation."""

from contextlib import contextmanager
from dataclasses import dataclass, replace

from .balancing import balanced_series, inv_sqrt_series, transform_series, truncate
from .errors import InvalidOrder, NumericalError
from .factors import factor_series, product_series
from .gramians import controllability_series, observability_series
from .svd_perturb import MAX_ORDER, svd_series
from .tolerances import DEFAULT

__all__ = ["PipelineResult", "run_pipeline", "STAGES"]

STAGES = ("gramians", "factors", "product", "svd", "balancing", "truncation")


@contextmanager
def stage(name):
    try:
        yield
    except NumericalError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


@dataclass(frozen=True, eq=False)
class PipelineResult:
    system: object
    order: int
    Wc: object
    Wo: object
    X: object
    Y: object
    R: object
    svd: object
    S: object
    balanced: object
    reduced: object = None

    def replace(self, **changes):
        return replace(self, **changes)


def run_pipeline(sys, order=2, r=None, tol=DEFAULT):
    """Run every stage on a :class:`ParametricLTI`.

    Parameters
    ----------
    sys : ParametricLTI
    order : int
        Series order of the result, 0 to 2.
    r : int, optional
        Reduction order; if given the result carries a ``reduced`` model.
    tol : Tolerances

    Raises
    ------
    NumericalError
        With ``stage`` set to the failing stage name.
    """
    if not 0 <= order <= MAX_ORDER:
        raise InvalidOrder(f"pipeline order must be 0..{MAX_ORDER}, got {order}")
    if order > sys.order:
        raise InvalidOrder(f"pipeline order {order} exceeds model order {sys.order}")
    if r is not None and not 1 <= r < sys.n:
        raise InvalidOrder(f"reduction order must satisfy 1 <= r < {sys.n}, got {r}")
    sys = sys.truncate(order)
    with stage("gramians"):
        Wc = controllability_series(sys, order, tol)
        Wo = observability_series(sys, order, tol)
    with stage("factors"):
        X = factor_series(Wc, order, tol)
        Y = factor_series(Wo, order, tol)
    with stage("product"):
        R = product_series(Y, X, order)
    with stage("svd"):
        svd = svd_series(R, order, tol)
    with stage("balancing"):
        S = inv_sqrt_series(svd.Sigma)
        T, Tinv = transform_series(X, Y, svd, S)
        bal = balanced_series(sys, T, Tinv, svd.Sigma)
    reduced = None
    if r is not None:
        with stage("truncation"):
            reduced = truncate(bal, r)
    return PipelineResult(sys, order, Wc, Wo, X, Y, R, svd, S, bal, reduced)
