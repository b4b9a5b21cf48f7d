"""Frequency responses, Bode data and H-infinity error estimates.

The H-infinity norm is estimated on a logarithmic frequency grid with a
local refinement around the peak; a grid estimate can only undershoot the
true norm.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import SolveFailed

__all__ = [
    "FrequencyGrid",
    "frequency_response",
    "bode",
    "sigma_max_response",
    "hinf_grid_estimate",
    "max_deviation",
    "ErrorReport",
    "error_report",
    "write_csv",
    "bode_columns",
    "bode_deviation",
    "compare_responses",
    "CSV_SCHEMA",
]

CSV_SCHEMA = "parambt-frequency-csv/1"

DEFAULT_WMIN = 1e-2
DEFAULT_WMAX = 1e3
DEFAULT_COUNT = 400
REFINE_POINTS = 20
REFINE_HALF_WIDTH = 0.5  # decades on each side of the peak


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing positive angular frequencies in rad/s."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size == 0 or np.any(pts <= 0) or np.any(np.diff(pts) <= 0):
            raise ValueError("frequency grid must be positive and strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def logspace(cls, wmin=DEFAULT_WMIN, wmax=DEFAULT_WMAX, count=DEFAULT_COUNT):
        if not 0 < wmin < wmax or count < 2:
            raise ValueError(f"invalid grid bounds ({wmin}, {wmax}, {count})")
        return cls(np.logspace(np.log10(wmin), np.log10(wmax), count))

    @property
    def count(self):
        return self.points.size

    @property
    def min(self):
        return self.points[0]

    @property
    def max(self):
        return self.points[-1]

    def merged(self, other):
        pts = np.union1d(self.points, np.asarray(getattr(other, "points", other)))
        return FrequencyGrid(pts)

    def around(self, w, count=REFINE_POINTS, half_width=REFINE_HALF_WIDTH):
        """Local log-spaced grid of ``count`` points within
        ``+-half_width`` decades of ``w``."""
        lw = np.log10(w)
        return FrequencyGrid(np.logspace(lw - half_width, lw + half_width, count))


def frequency_response(sys, grid):
    """``G(i w) = C (i w I - A)^{-1} B`` for every grid point.

    Returns a complex array of shape ``(len(grid), P, M)``.
    """
    pts = grid.points if isinstance(grid, FrequencyGrid) else np.asarray(grid, float)
    n = sys.A.shape[0]
    eye = np.eye(n)
    out = np.empty((pts.size, sys.C.shape[0], sys.B.shape[1]), dtype=complex)
    for k, w in enumerate(pts):
        try:
            Z = np.linalg.solve(1j * w * eye - sys.A, sys.B)
        except np.linalg.LinAlgError:
            raise SolveFailed(f"i*{w} is an eigenvalue of A") from None
        G = sys.C @ Z
        if not np.all(np.isfinite(G)):
            raise SolveFailed(f"non-finite response at w={w}")
        out[k] = G
    return out


def bode(response):
    """Magnitude in dB and unwrapped phase in degrees, per channel."""
    mag_db = 20.0 * np.log10(np.abs(response))
    phase = np.degrees(np.unwrap(np.angle(response), axis=0))
    return mag_db, phase


def sigma_max_response(response):
    """Largest singular value of each ``P x M`` response matrix."""
    if response.shape[1] == 1 or response.shape[2] == 1:
        return np.linalg.norm(response.reshape(response.shape[0], -1), axis=1)
    return np.linalg.svd(response, compute_uv=False)[:, 0]


def hinf_grid_estimate(response):
    return float(np.max(sigma_max_response(response)))


def max_deviation(resp_a, resp_b):
    """Grid H-infinity estimate of the difference of two responses."""
    return hinf_grid_estimate(resp_a - resp_b)


@dataclass
class ErrorReport:
    hinf_grid_estimate: float
    lower_bound: float
    upper_bound: float
    omega: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    peak_omega: float = float("nan")
    coarse_estimate: float = float("nan")
    roundoff: float = 0.0

    @property
    def upper_ok(self):
        # the estimate of an exactly zero error is roundoff, not zero
        return self.hinf_grid_estimate <= self.upper_bound + self.roundoff

    @property
    def lower_ok(self):
        return self.lower_bound <= self.hinf_grid_estimate

    @property
    def within_bounds(self):
        return self.lower_ok and self.upper_ok

    def to_dict(self):
        return {
            "hinf_grid_estimate": self.hinf_grid_estimate,
            "coarse_estimate": self.coarse_estimate,
            "peak_omega": self.peak_omega,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "roundoff": self.roundoff,
            "lower_ok": bool(self.lower_ok),
            "upper_ok": bool(self.upper_ok),
        }


ROUNDOFF_FACTOR = 1e3


def _error_magnitudes(full, reduced, pts):
    G = frequency_response(full, pts)
    err = sigma_max_response(G - frequency_response(reduced, pts))
    return err, float(np.max(sigma_max_response(G)))


def error_report(full, reduced, sigma, r, grid=None, refine=True):
    """Compare ``||G - G_r||`` on a grid against ``sigma_{r+1}`` and
    ``2 sum_{i>r} sigma_i``.

    With ``refine`` the grid is augmented by a local grid around the coarse
    peak, so the estimate can only grow. The upper-bound test allows a
    roundoff slack of ``1e3 eps`` times the peak gain of ``full``.
    """
    if full.B.shape[1] != reduced.B.shape[1] or full.C.shape[0] != reduced.C.shape[0]:
        raise ValueError("full and reduced systems have different I/O dimensions")
    sigma = np.asarray(sigma, dtype=float)
    grid = grid or FrequencyGrid.logspace()
    tail = sigma[r:]
    lower = float(tail[0]) if tail.size else 0.0
    upper = float(2.0 * tail.sum())
    pts = grid.points
    errs, gmax = _error_magnitudes(full, reduced, pts)
    coarse = float(errs.max())
    if refine:
        local = grid.around(pts[np.argmax(errs)]).points
        local_errs, local_gmax = _error_magnitudes(full, reduced, local)
        pts = np.concatenate((pts, local))
        errs = np.concatenate((errs, local_errs))
        gmax = max(gmax, local_gmax)
        order = np.argsort(pts, kind="stable")
        pts, errs = pts[order], errs[order]
    k = int(np.argmax(errs))
    roundoff = ROUNDOFF_FACTOR * np.finfo(float).eps * gmax
    return ErrorReport(float(errs[k]), lower, upper, pts, errs, float(pts[k]), coarse,
                       roundoff)


def write_csv(path, first_name, first_values, columns):
    """Write a CSV whose first line is a ``# schema=...`` comment.

    ``columns`` maps column names to arrays of the same length as
    ``first_values``; rows follow insertion order of the mapping.
    """
    names = [first_name] + list(columns)
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema={CSV_SCHEMA}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for k, x in enumerate(first_values):
            writer.writerow([repr(float(x))] + [repr(float(columns[c][k])) for c in columns])


def _channel_suffix(P, M, p, q):
    return "" if P * M == 1 else f"_y{p + 1}u{q + 1}"


def bode_columns(name, response):
    """CSV columns ``mag_db_<name>[_y1u1]`` and ``phase_deg_<name>[...]``."""
    mag, phase = bode(response)
    _, P, M = response.shape
    cols = {}
    for p in range(P):
        for q in range(M):
            sfx = _channel_suffix(P, M, p, q)
            cols[f"mag_db_{name}{sfx}"] = mag[:, p, q]
            cols[f"phase_deg_{name}{sfx}"] = phase[:, p, q]
    return cols


def bode_deviation(response, reference):
    """Worst-case Bode-plot gaps between two responses.

    Returns ``(max_dev_db, max_dev_phase_deg, max_dev_abs)``: the largest
    magnitude gap in dB, the largest phase gap in degrees (both over all
    channels and grid points), and the grid H-infinity estimate of the
    difference.
    """
    ratio = response / reference
    dev_db = float(np.max(np.abs(20.0 * np.log10(np.abs(ratio)))))
    dev_phase = float(np.degrees(np.max(np.abs(np.angle(ratio)))))
    return dev_db, dev_phase, max_deviation(response, reference)


def compare_responses(candidates, reference, grid):
    """Frequency responses of several models against a reference model.

    Parameters
    ----------
    candidates : dict
        Name to :class:`NumericLTI`; insertion order fixes column order.
    reference : NumericLTI
        Its columns use the name ``exact``.
    grid : FrequencyGrid

    Returns
    -------
    columns : dict
        CSV-ready Bode columns.
    summary : dict
        Name to ``{"max_dev_db", "max_dev_phase_deg", "max_dev_abs"}``.
    """
    ref = frequency_response(reference, grid)
    columns = {}
    summary = {}
    for name, sys in candidates.items():
        resp = frequency_response(sys, grid)
        columns.update(bode_columns(name, resp))
        db, ph, ab = bode_deviation(resp, ref)
        summary[name] = {"max_dev_db": db, "max_dev_phase_deg": ph, "max_dev_abs": ab}
    columns.update(bode_columns("exact", ref))
    return columns, summary
