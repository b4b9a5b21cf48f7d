"""Central table of numerical tolerances and thresholds.

Every kernel takes these as keyword defaults, and the command line can
override any of them through the ``tolerances`` section of a run config.
"""

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    #: symmetric inputs may deviate from symmetry by this much (relative)
    symmetry: float = 1e-10
    #: estimated 2-norm condition number above which a solve is refused
    cond_max: float = 1e12
    #: 1-norm condition estimate for the Kronecker Lyapunov operator
    lyapunov_cond_max: float = 1e13
    #: scaled residual bound for every Lyapunov solve
    lyapunov_residual: float = 1e-10
    #: one-sided Jacobi stops once every column pair cosine is below this
    jacobi_tol: float = 1e-14
    jacobi_max_sweeps: int = 60
    #: singular values below ``svd_floor * sigma_max`` count as zero
    svd_floor: float = 1e-12
    #: minimum relative gap (sigma_i - sigma_{i+1}) / sigma_1 for perturbation
    degeneracy_gap: float = 1e-6
    #: scaled residual bound for the bordered singular-vector systems
    bordered_residual: float = 1e-10
    #: relative agreement of the two second-order singular value formulas
    sigma2_crosscheck: float = 1e-9
    #: per-coefficient tolerance of the validation suite (scaled)
    coefficient_check: float = 1e-9

    def to_dict(self):
        return asdict(self)

    def updated(self, overrides):
        """Return a copy with ``overrides`` (a mapping) applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **overrides)


DEFAULT = Tolerances()
