"""Command-line front end.

Subcommands::

    parambt build     write the model JSON
    parambt reduce    run the pipeline, write the reduced model and a report
    parambt compare   Bode data of the order-0/1/2 reductions vs the exact one
    parambt validate  run the invariant suite, exit 0 iff every check passes

Every option mirrors a key of a JSON config file given with ``--config``;
options on the command line take precedence over the file. Config keys:

``model``
    ``"mass-spring"`` (default) or the path of a model JSON file.
``N``, ``stiffness``, ``damping``
    Mass-spring chain: number of masses (10), spring constants (default
    ``100 (i+1)``) and damping constants (default 1), the latter two as lists.
``order``
    Series order (2). The SVD perturbation supports orders up to 2.
``r``
    Reduction order (4), ``1 <= r < n``.
``m``
    Parameter values for ``compare`` ([0.5]).
``wmin``, ``wmax``, ``points``
    Log-spaced frequency grid in rad/s (1e-2, 1e3, 400).
``output_dir``
    Directory receiving all output files (``out``).
``tolerances``
    Overrides of :class:`~parambt.tolerances.Tolerances` fields.
``inject_fault``, ``fault_delta``
    ``validate`` only: corrupt one stored coefficient before checking.

Model JSON (schema ``parametric-lti/1``)::

    {"schema": "parametric-lti/1", "order": K,
     "dims": {"n": n, "m": inputs, "p": outputs},
     "A": [A_0, ..., A_K], "B": [...], "C": [...]}

with every coefficient a row-major nested list. The reduced-model JSON adds
``r``, ``sigma_series`` (``[[sigma_i^(0)], [sigma_i^(1)], ...]``) and
``sigma_tail`` (the discarded ``sigma_i^(0)``).

For a model read from a file the truncated series itself is taken as the
exact system when reference values at a numeric ``m`` are needed.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure
(the failing stage is printed on standard error). ``validate`` also exits
with 2 when a check fails.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

from .analysis import FrequencyGrid, compare_responses, write_csv
from .errors import ConfigError, NumericalError
from .ltimodel import (
    MassSpringConfig,
    ParametricLTI,
    build_mass_spring,
    mass_spring_numeric,
)
from .oracle import reduce_exact
from .pipeline import run_pipeline
from .tolerances import DEFAULT
from .validate import FAULT_TARGETS, Check, ValidationReport, inject_fault, validate_pipeline

__all__ = ["RunConfig", "main", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
BUILTIN = "mass-spring"
REDUCE_SCHEMA = "parambt-reduce-report/1"
COMPARE_SCHEMA = "parambt-compare/1"
COMPARE_ORDERS = (0, 1, 2)


@dataclass
class RunConfig:
    model: str = BUILTIN
    N: int = 10
    stiffness: list = None
    damping: list = None
    order: int = 2
    r: int = 4
    m: list = field(default_factory=lambda: [0.5])
    wmin: float = 1e-2
    wmax: float = 1e3
    points: int = 400
    output_dir: str = "out"
    tolerances: dict = field(default_factory=dict)
    inject_fault: str = None
    fault_delta: float = 1e-6

    def __post_init__(self):
        if self.r < 1:
            raise ConfigError(f"r must be >= 1, got {self.r}")
        if self.order < 0:
            raise ConfigError(f"order must be >= 0, got {self.order}")
        self.m = [float(x) for x in self.m]
        if not all(math.isfinite(x) for x in self.m):
            raise ConfigError(f"parameter values must be finite, got {self.m}")
        if not self.m:
            raise ConfigError("need at least one parameter value")
        if self.inject_fault is not None and self.inject_fault not in FAULT_TARGETS:
            raise ConfigError(f"unknown fault target {self.inject_fault!r}; "
                              f"choose from {', '.join(FAULT_TARGETS)}")
        try:
            self.tol = DEFAULT.updated(self.tolerances)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        try:
            self.grid = FrequencyGrid.logspace(self.wmin, self.wmax, self.points)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_sources(cls, file_data=None, overrides=None):
        data = dict(file_data or {})
        data.pop("schema", None)
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        unknown = set(data) - set(cls.keys())
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config: {exc}") from None

    @property
    def builtin(self):
        return self.model == BUILTIN

    def mass_spring(self):
        kw = {"N": self.N, "order": self.order}
        if self.stiffness is not None:
            kw["stiffness"] = tuple(self.stiffness)
        if self.damping is not None:
            kw["damping"] = tuple(self.damping)
        return MassSpringConfig(**kw)

    def load_model(self):
        if self.builtin:
            return build_mass_spring(self.mass_spring())
        return ParametricLTI.load(self.model)

    def exact_system(self, model):
        """``m -> NumericLTI`` reference for the configured model."""
        if self.builtin:
            cfg = self.mass_spring()
            return lambda m: mass_spring_numeric(cfg, m)
        return model.at


# -- output helpers ---------------------------------------------------------

def _output_path(cfg, name):
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, name)


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, allow_nan=False)
        fh.write("\n")


def _m_tag(m):
    return repr(float(m)).replace("-", "neg")


def _check_reduction(cfg, model):
    if not cfg.r < model.n:
        raise ConfigError(f"reduction order must satisfy r < n = {model.n}, got r={cfg.r}")


def _check_order(cfg, model):
    if cfg.order > 2:
        raise ConfigError(f"pipeline order must be at most 2, got {cfg.order}")
    if cfg.order > model.order:
        raise ConfigError(f"order {cfg.order} exceeds model order {model.order}")


# -- subcommands ------------------------------------------------------------

def cmd_build(cfg):
    model = cfg.load_model()
    if not cfg.builtin:
        model = model.truncate(min(cfg.order, model.order))
    path = _output_path(cfg, "model.json")
    model.save(path)
    print(f"wrote {path} ({model.n} states, order {model.order})")
    return EXIT_OK


def cmd_reduce(cfg):
    model = cfg.load_model()
    _check_order(cfg, model)
    _check_reduction(cfg, model)
    res = run_pipeline(model, cfg.order, cfg.r, cfg.tol)
    diagnostics = validate_pipeline(res, tol=cfg.tol)
    red_path = _output_path(cfg, "reduced.json")
    res.reduced.save(red_path)
    report = {
        "schema": REDUCE_SCHEMA,
        "n": model.n,
        "r": cfg.r,
        "order": cfg.order,
        "sigma_series": [list(s) for s in res.reduced.sigma_series],
        "sigma_tail": list(res.reduced.sigma_tail),
        "error_bound": 2.0 * sum(res.reduced.sigma_tail),
        "diagnostics": diagnostics.to_dict(),
    }
    rep_path = _output_path(cfg, "reduce_report.json")
    _write_json(rep_path, report)
    print(f"wrote {red_path} and {rep_path}")
    if not diagnostics.ok:
        print(f"warning: diagnostics failed in stage {diagnostics.first_failure_stage}",
              file=sys.stderr)
    return EXIT_OK


def cmd_compare(cfg):
    model = cfg.load_model()
    if cfg.order < max(COMPARE_ORDERS):
        raise ConfigError(f"compare needs order {max(COMPARE_ORDERS)}, got {cfg.order}")
    _check_order(cfg, model)
    _check_reduction(cfg, model)
    res = run_pipeline(model, cfg.order, cfg.r, cfg.tol)
    exact = cfg.exact_system(model)
    written = []
    summary = {"schema": COMPARE_SCHEMA, "r": cfg.r, "wmin": cfg.wmin, "wmax": cfg.wmax,
               "points": cfg.points, "results": []}
    for m in cfg.m:
        candidates = {f"order{k}": res.reduced.with_order(k).at(m) for k in COMPARE_ORDERS}
        reference = reduce_exact(exact(m), cfg.r, cfg.tol)
        columns, dev = compare_responses(candidates, reference, cfg.grid)
        path = _output_path(cfg, f"compare_m{_m_tag(m)}.csv")
        write_csv(path, "omega", cfg.grid.points, columns)
        written.append(path)
        db = [dev[f"order{k}"]["max_dev_db"] for k in COMPARE_ORDERS]
        summary["results"].append({
            "m": m,
            "csv": os.path.basename(path),
            "deviation": dev,
            "monotone_db": all(a >= b for a, b in zip(db, db[1:])),
        })
    sum_path = _output_path(cfg, "compare_summary.json")
    _write_json(sum_path, summary)
    written.append(sum_path)
    for item in summary["results"]:
        devs = ", ".join(f"{k}: {v['max_dev_db']:.4g} dB" for k, v in item["deviation"].items())
        print(f"m={item['m']:g}: {devs}")
    print(f"wrote {len(written)} files to {cfg.output_dir}")
    return EXIT_OK


def cmd_validate(cfg):
    """Run the invariant suite; numerical failures become report content."""
    model = cfg.load_model()
    _check_order(cfg, model)
    try:
        res = run_pipeline(model, cfg.order, tol=cfg.tol)
    except NumericalError as exc:
        report = ValidationReport([Check("pipeline", exc.stage or "pipeline", "fail",
                                         detail=f"{type(exc).__name__}: {exc}")])
    else:
        if cfg.inject_fault is not None:
            res = inject_fault(res, cfg.inject_fault, cfg.fault_delta)
        report = validate_pipeline(res, cfg.exact_system(model), cfg.tol)
    data = report.to_dict()
    data["inject_fault"] = cfg.inject_fault
    path = _output_path(cfg, "validate.json")
    _write_json(path, data)
    counts = {}
    for c in report.checks:
        counts[c.status] = counts.get(c.status, 0) + 1
    print(f"wrote {path}: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())))
    if not report.ok:
        names = ", ".join(c.name for c in report.failures)
        print(f"validation failed in stage {report.first_failure_stage}: {names}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {"build": cmd_build, "reduce": cmd_reduce, "compare": cmd_compare,
            "validate": cmd_validate}


# -- argument parsing -------------------------------------------------------

def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _tol_pair(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key.strip(), (int(value) if value.strip().isdigit() else float(value))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--model", help=f"'{BUILTIN}' or a model JSON path")
    common.add_argument("--N", type=int, help="number of masses")
    common.add_argument("--stiffness", type=_float_list, help="comma-separated k_i")
    common.add_argument("--damping", type=_float_list, help="comma-separated gamma_i")
    common.add_argument("--order", type=int, help="series order")
    common.add_argument("--r", type=int, help="reduction order")
    common.add_argument("--m", type=_float_list, help="comma-separated parameter values")
    common.add_argument("--wmin", type=float, help="lowest frequency, rad/s")
    common.add_argument("--wmax", type=float, help="highest frequency, rad/s")
    common.add_argument("--points", type=int, help="number of grid points")
    common.add_argument("--output-dir", dest="output_dir", help="output directory")
    common.add_argument("--tol", dest="tolerances", type=_tol_pair, action="append",
                        metavar="KEY=VALUE", help="tolerance override (repeatable)")
    common.add_argument("--inject-fault", dest="inject_fault", choices=FAULT_TARGETS,
                        help="validate: corrupt one stored coefficient")
    common.add_argument("--fault-delta", dest="fault_delta", type=float,
                        help="validate: relative size of the injected fault")

    parser = argparse.ArgumentParser(prog="parambt",
                                     description="Parametric balanced truncation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__ and fn.__doc__.split("\n")[0])
    return parser


def _load_config_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return data


def config_from_args(args):
    file_data = _load_config_file(args.config) if args.config else {}
    overrides = {k: getattr(args, k, None) for k in RunConfig.keys()}
    if overrides["tolerances"] is not None:
        merged = dict(file_data.get("tolerances", {}))
        merged.update(dict(overrides["tolerances"]))
        overrides["tolerances"] = merged
    return RunConfig.from_sources(file_data, overrides)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except NumericalError as exc:
        print(f"error: numerical failure in stage {exc.stage or 'unknown'}: "
              f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
