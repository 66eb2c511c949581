"""
Configuration-driven experiment runner and report writer.

A JSON config with the blocks "problem", "grid", "command" and "output" selects one
experiment; the result is wrapped in a ReportEnvelope and written as <command>.json plus one
CSV file per table.
"""

import argparse
import copy
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields

import numpy as np
import pandas as pd

from .common import (
    BoundFails,
    ConfigError,
    ConvergenceTable,
    IoError,
    Space,
    WentzellError,
    check_file_path,
    dumps_report,
    operator_norm,
    split_complex_columns,
)
from .decomposition import (
    OPERATORS,
    dirichlet_map,
    dtn_operator,
    operator_matrix,
    resolvent_block_check,
    similarity_check,
)
from .disk import (
    build_disk_model,
    disk_generation_report,
    disk_relative_bound,
    disk_wq_identity_check,
)
from .interval import WentzellProblem, build_model, wentzell_generator
from .perturbation import (
    SCENARIOS,
    dirichlet_identity_check,
    dtn_difference_check,
    feedback_split_experiment,
    split_feedback,
)
from .probes import (
    dirichlet_convergence,
    dtn_convergence,
    evolve_and_structure_check,
    relative_bound_probe,
    sector_angle_estimate,
    similarity_convergence,
    theorem31_experiment,
)

COMMANDS = (
    "dirichlet",
    "dtn",
    "similarity-check",
    "resolvent-check",
    "sector",
    "relbound",
    "evolve",
    "perturb-check",
    "split-check",
    "disk",
    "converge",
    "theorem31",
)
DISK_COMMANDS = ("disk", "split-check")
FORMATS = ("json", "csv")
OUTPUT_ENV = "WENTZELL_LAB_OUTPUT"

INTERVAL_FIELDS = {f.name for f in fields(WentzellProblem)}
DISK_FIELDS = {"K", "beta", "gamma", "q"}

COMMAND_PARAMS = {
    "dirichlet": {"lam": "scalar", "op": "op", "x": "vector"},
    "dtn": {"lam": "scalar", "op": "op", "feedback": "feedback"},
    "similarity-check": {"samples": "count", "shift": "real"},
    "resolvent-check": {"lams": "reals", "shift": "real"},
    "sector": {
        "operator": "operator",
        "shift": "real",
        "threshold": "real",
        "norm": "norm",
        "lifting_shift": "real",
    },
    "relbound": {"lams": "reals", "norm": "norm"},
    "evolve": {"ts": "times", "shift": "real"},
    "perturb-check": {"lams": "scalars"},
    "split-check": {"scenario": "scenario", "C": "matrix", "tolerance": "real"},
    "disk": {"epsilons": "reals", "ts": "times"},
    "converge": {"target": "target", "lam": "scalar", "samples": "count", "x": "vector"},
    "theorem31": {
        "shift": "real",
        "tolerance": "real",
        "threshold": "real",
        "include_pure_wentzell": "bool",
    },
}
CHOICES = {
    "op": OPERATORS,
    "feedback": ("B", "B0"),
    "operator": ("generator", "A0", "G0", "N"),
    "norm": ("sup", "spectral"),
    "scenario": SCENARIOS,
    "target": ("dirichlet", "dtn", "similarity"),
}


def _is_real(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_scalar(value):
    if _is_real(value):
        return True
    if isinstance(value, str):
        try:
            complex(value.replace(" ", ""))
            return True
        except ValueError:
            return False
    return False


def _is_coefficient(value):
    if _is_scalar(value):
        return True
    if isinstance(value, dict):
        return set(value) == {"poly"} and isinstance(value["poly"], list) and all(
            _is_scalar(c) for c in value["poly"]
        )
    if isinstance(value, list):
        return len(value) > 0 and all(_is_coefficient(v) for v in value)
    return False


def _check_param(name, kind, value):
    ok = {
        "scalar": _is_scalar,
        "real": _is_real,
        "count": lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0,
        "bool": lambda v: isinstance(v, bool),
        "reals": lambda v: isinstance(v, list) and len(v) > 0 and all(_is_real(x) for x in v),
        "times": lambda v: isinstance(v, list) and all(_is_real(x) and x >= 0 for x in v),
        "scalars": lambda v: isinstance(v, list) and len(v) > 0 and all(_is_scalar(x) for x in v),
        "vector": lambda v: isinstance(v, list) and all(_is_scalar(x) for x in v),
        "matrix": lambda v: isinstance(v, list) and all(
            isinstance(row, list) and all(_is_scalar(x) for x in row) for row in v
        ),
    }.get(kind)
    if ok is None:
        if value not in CHOICES[kind]:
            raise ConfigError(f"command.{name} must be one of {CHOICES[kind]}, got {value!r}")
        return
    if not ok(value):
        raise ConfigError(f"command.{name} is ill-typed: expected {kind}, got {value!r}")


def _to_complex(value):
    return complex(value.replace(" ", "")) if isinstance(value, str) else complex(value)


def _grid_sizes(grid):
    N = grid.get("N")
    sizes = N if isinstance(N, list) else [N]
    if not sizes or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 5 for x in sizes):
        raise ConfigError(f"grid.N must be an integer >= 5 or a list of them, got {N!r}")
    return sizes


def _shape(value, name):
    """Shape of a nested list of coefficients; dictionaries and scalars are leaves."""
    if not isinstance(value, list):
        return ()
    if not value:
        return (0,)
    shapes = {_shape(v, name) for v in value}
    if len(shapes) != 1:
        raise ConfigError(f"{name} is a ragged list: {value!r}")
    return (len(value),) + shapes.pop()


def _check_problem_shapes(problem):
    n = problem.get("n", 1)
    for key in ("a", "b", "c", "p1", "p0"):
        if problem.get(key) is not None:
            shape = _shape(problem[key], f"problem.{key}")
            if shape not in ((), (n,), (n, n)):
                raise ConfigError(
                    f"problem.{key} must be a scalar, a length-{n} list or a {n}x{n} matrix, "
                    f"got shape {shape}"
                )
    for key in ("M0", "M1", "N0", "N1"):
        if problem.get(key) is not None:
            shape = _shape(problem[key], f"problem.{key}")
            if int(np.prod(shape)) != 2 * n * n:
                raise ConfigError(
                    f"problem.{key} must be a {2 * n}x{n} matrix, got shape {shape}"
                )
    if problem.get("kernel") is not None:
        shape = _shape(problem["kernel"], "problem.kernel")
        allowed = ((), (2 * n, n)) + (((2,),) if n == 1 else ())
        if shape not in allowed:
            raise ConfigError(f"problem.kernel must be {2 * n}x{n} or a scalar, got shape {shape}")
    if n != 1 and (problem.get("beta") is not None or problem.get("gamma") is not None):
        raise ConfigError("problem.beta and problem.gamma are only defined for n = 1")


def _check_command_shapes(block, problem, sizes):
    """Sizes of command parameters against the problem and the nesting of grid lists."""
    n = problem.get("n", 1)
    name = block["name"]
    if "x" in block and len(block["x"]) != 2 * n:
        raise ConfigError(f"command.x needs {2 * n} boundary values, got {len(block['x'])}")
    if "C" in block:
        shape = _shape(block["C"], "command.C")
        if shape != (2 * n, 2 * n):
            raise ConfigError(f"command.C must be a {2 * n}x{2 * n} matrix, got shape {shape}")
    refines_lifting = (name == "dirichlet" and len(sizes) > 1) or (
        name == "converge" and block.get("target", "dirichlet") == "dirichlet"
    )
    if refines_lifting:
        finest = max(sizes)
        for N in sizes:
            if (finest - 1) % (N - 1):
                raise ConfigError(
                    f"grid.N={N} is not nested in N={finest}: N-1 must divide {finest - 1}"
                )


def default_output_directory():
    """Report directory: $WENTZELL_LAB_OUTPUT if set, else ./wentzell_reports."""
    return os.environ.get(OUTPUT_ENV, "wentzell_reports")


def parse_formats(text):
    """Parses a comma-separated list of report formats."""
    formats = [f.strip().lower() for f in text.split(",") if f.strip()]
    unknown = [f for f in formats if f not in FORMATS]
    if unknown or not formats:
        raise ConfigError(f"formats must be a subset of {FORMATS}, got {text!r}")
    return formats


def load_config(path):
    """Reads a JSON config file.

    Raises:
        ConfigError: If the file cannot be read or parsed.
    """
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e


def validate_config(config, command=None):
    """Type-checks a config and fills in the command name.

    Args:
        config (dict): The parsed config.
        command (str, optional): Subcommand given on the command line. Defaults to None.

    Raises:
        ConfigError: Naming the first missing or ill-typed field.

    Returns:
        dict: A normalized deep copy of the config.
    """
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    config = copy.deepcopy(config)

    problem = config.get("problem")
    if not isinstance(problem, dict):
        raise ConfigError("missing required field 'problem'")
    kind = problem.get("kind", "interval")
    if kind not in ("interval", "disk"):
        raise ConfigError(f"problem.kind must be 'interval' or 'disk', got {kind!r}")
    problem["kind"] = kind
    allowed = (INTERVAL_FIELDS if kind == "interval" else DISK_FIELDS) | {"kind"}
    for key in problem:
        if key not in allowed:
            raise ConfigError(f"unknown field 'problem.{key}' for a {kind} problem")

    if kind == "interval":
        n = problem.get("n", 1)
        if not (isinstance(n, int) and not isinstance(n, bool) and n >= 1):
            raise ConfigError(f"problem.n must be a positive integer, got {n!r}")
        for key in ("beta", "gamma", "a_min"):
            if key in problem and problem[key] is not None and not _is_real(problem[key]):
                raise ConfigError(f"problem.{key} must be a real number, got {problem[key]!r}")
        for key in ("a", "b", "c", "M0", "M1", "N0", "N1", "p1", "p0", "kernel"):
            if key in problem and problem[key] is not None and not _is_coefficient(problem[key]):
                raise ConfigError(f"problem.{key} is ill-typed: {problem[key]!r}")
        grid = config.get("grid")
        if not isinstance(grid, dict) or "N" not in grid:
            raise ConfigError("missing required field 'grid.N'")
        _grid_sizes(grid)
        _check_problem_shapes(problem)
    else:
        if "K" in problem and not (isinstance(problem["K"], int) and problem["K"] >= 1):
            raise ConfigError(f"problem.K must be a positive integer, got {problem['K']!r}")
        for key in ("beta", "gamma", "q"):
            if key in problem and not _is_real(problem[key]):
                raise ConfigError(f"problem.{key} must be a real number, got {problem[key]!r}")

    block = config.get("command", {})
    if not isinstance(block, dict):
        raise ConfigError("field 'command' must be an object")
    name = block.get("name", command)
    if name is None:
        raise ConfigError("missing required field 'command.name'")
    if command is not None and name != command:
        raise ConfigError(f"command.name {name!r} does not match subcommand {command!r}")
    if name not in COMMANDS:
        raise ConfigError(f"command.name must be one of {COMMANDS}, got {name!r}")
    if kind == "disk" and name not in DISK_COMMANDS:
        raise ConfigError(f"command {name!r} needs an interval problem")
    if kind == "interval" and name == "disk":
        raise ConfigError("command 'disk' needs a disk problem (problem.kind = 'disk')")
    block["name"] = name
    for key, value in block.items():
        if key == "name":
            continue
        if key not in COMMAND_PARAMS[name]:
            raise ConfigError(f"unknown parameter 'command.{key}' for {name}")
        _check_param(key, COMMAND_PARAMS[name][key], value)
    if name == "converge" and kind == "interval" and len(_grid_sizes(config["grid"])) < 2:
        raise ConfigError("converge needs a list of at least two grid sizes in grid.N")
    if kind == "interval":
        _check_command_shapes(block, problem, _grid_sizes(config["grid"]))
    config["command"] = block

    output = config.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("field 'output' must be an object")
    if "directory" in output and not isinstance(output["directory"], str):
        raise ConfigError("output.directory must be a string")
    if "formats" in output:
        formats = output["formats"]
        if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
            raise ConfigError(f"output.formats must be a non-empty subset of {FORMATS}")
    return config


def problem_from_config(block):
    """Builds a WentzellProblem or DiskModel from the problem block."""
    fields_ = {k: v for k, v in block.items() if k != "kind"}
    if block.get("kind", "interval") == "disk":
        return build_disk_model(**fields_)
    return WentzellProblem(**fields_)


@dataclass
class ReportEnvelope:
    """Everything one run produced, plus what is needed to reproduce it."""

    tool_version: str
    command: str
    config: dict
    seed: int
    wall_time: float
    verdict: str
    payload: dict
    tables: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "verdict": self.verdict,
            "payload": self.payload,
            "tables": self.tables,
        }


def _table_frame(table):
    if isinstance(table, ConvergenceTable):
        return table.to_frame()
    return pd.DataFrame({key: np.asarray(values) for key, values in table.items()})


def emit_report(envelope, formats=None, directory=None):
    """Writes the envelope as JSON and its tables as CSV.

    Args:
        envelope (ReportEnvelope): The report.
        formats (list, optional): Subset of ("json", "csv"). Defaults to ["json"].
        directory (str, optional): Output directory. Defaults to default_output_directory().

    Raises:
        IoError: If a file cannot be written.

    Returns:
        list: Paths of the written files.
    """
    formats = ["json"] if formats is None else list(formats)
    directory = default_output_directory() if directory is None else directory
    paths = []
    try:
        if "json" in formats:
            path = check_file_path(os.path.join(directory, f"{envelope.command}.json"))
            with open(path, "w", encoding="utf-8") as f:
                f.write(dumps_report(envelope))
                f.write("\n")
            paths.append(path)
        if "csv" in formats:
            for name, table in envelope.tables.items():
                path = check_file_path(os.path.join(directory, f"{name}.csv"))
                frame = split_complex_columns(_table_frame(table))
                frame.to_csv(path, index=False, float_format="%.17g")
                paths.append(path)
    except OSError as e:
        raise IoError(f"cannot write report to {directory}: {e}") from e
    return paths


class WentzellLab:
    """Runs one configured experiment and keeps its report."""

    def __init__(self, config, command=None, seed=0, quiet=False):
        """Initialize the class.

        Args:
            config (dict): Parsed JSON config.
            command (str, optional): Subcommand; must agree with command.name when both are
                given. Defaults to None.
            seed (int, optional): Seed for sampled checks. Defaults to 0.
            quiet (bool, optional): Suppress progress output. Defaults to False.
        """
        self.config = validate_config(config, command)
        self.command = self.config["command"]["name"]
        self.params = {k: v for k, v in self.config["command"].items() if k != "name"}
        self.seed = int(seed)
        self.quiet = quiet
        self.problem = problem_from_config(self.config["problem"])
        grid = self.config.get("grid", {})
        self.grid_sizes = _grid_sizes(grid) if "N" in grid else []
        self.models = {}  # assembled models per node count
        self.caches = {}  # Dirichlet map memos per node count
        self.envelope = None

    def model(self, N=None):
        """The assembled model for N nodes, by default the finest configured grid."""
        N = max(self.grid_sizes) if N is None else N
        if N not in self.models:
            self.models[N] = build_model(self.problem, N)
            self.caches[N] = {}
        return self.models[N]

    def cache(self, N=None):
        N = max(self.grid_sizes) if N is None else N
        self.model(N)
        return self.caches[N]

    def execute(self):
        """Runs the configured command.

        Returns:
            ReportEnvelope: The report, also kept in self.envelope.
        """
        from . import __version__

        handler = getattr(self, "_run_" + self.command.replace("-", "_"))
        if not self.quiet:
            print(f"Running {self.command} ...")
        start = time.perf_counter()
        payload, verdict, tables = handler(**self.params)
        self.envelope = ReportEnvelope(
            tool_version=__version__,
            command=self.command,
            config=self.config,
            seed=self.seed,
            wall_time=time.perf_counter() - start,
            verdict=verdict,
            payload=payload,
            tables=tables,
        )
        return self.envelope

    def save_report(self, directory=None, formats=None):
        """Writes the last report.

        Args:
            directory (str, optional): Output directory. Defaults to output.directory from the
                config, then default_output_directory().
            formats (list, optional): Report formats. Defaults to output.formats, then ["json"].

        Returns:
            list: Paths of the written files.
        """
        if self.envelope is None:
            raise ValueError("Nothing to save, run execute() first.")
        output = self.config.get("output", {})
        directory = directory or output.get("directory")
        formats = formats or output.get("formats")
        paths = emit_report(self.envelope, formats, directory)
        if not self.quiet:
            for path in paths:
                print(f"Saved {path}")
        return paths

    def _run_dirichlet(self, lam=1.0, op="A_m", x=None):
        lam = _to_complex(lam)
        if len(self.grid_sizes) > 1:
            x = None if x is None else np.array([_to_complex(v) for v in x])
            table = dirichlet_convergence(self.problem, self.grid_sizes, lam, x, op, self.quiet)
            order = table.order
            verdict = "PASS" if order is not None and order >= 1.7 else "FAIL"
            return {"convergence": table}, verdict, {"convergence": table}

        model = self.model()
        grid = model.grid
        lifting = dirichlet_map(model, lam, op, cache=self.cache()).matrix.matrix
        A = {"A_m": model.A_m.matrix, "A_m+P": model.D.matrix}.get(op)
        payload = {
            "lam": lam,
            "op": op,
            "N": grid.N,
            "nodes": grid.nodes,
            "lifting": lifting,
            "trace_identity_residual": operator_norm(model.L.matrix @ lifting - np.eye(2 * model.n)),
        }
        if A is not None:
            interior = ((lam * np.eye(grid.size) - A) @ lifting)[grid.interior]
            payload["interior_residual"] = operator_norm(interior) / max(
                operator_norm(A) * operator_norm(lifting), 1.0
            )
        return payload, "N/A", {}

    def _run_dtn(self, lam=0.0, op="A_m", feedback="B"):
        dtn = dtn_operator(self.model(), _to_complex(lam), op, feedback, cache=self.cache())
        payload = {"lam": dtn.lam, "op": op, "feedback": dtn.feedback, "matrix": dtn.matrix}
        return payload, "N/A", {}

    def _run_similarity_check(self, samples=8, shift=0.0):
        if len(self.grid_sizes) > 1:
            table, verdict = similarity_convergence(
                self.problem, self.grid_sizes, samples, self.seed, self.quiet
            )
            return {"convergence": table}, verdict, {"convergence": table}
        report = similarity_check(self.model(), samples, self.seed, shift, cache=self.cache())
        return report, report["verdict"], {}

    def _run_resolvent_check(self, lams=(1.0, 10.0, 100.0), shift=0.0):
        report = resolvent_block_check(self.model(), lams, shift, cache=self.cache())
        return report, report["verdict"], {}

    def _run_sector(self, operator="generator", shift=None, threshold=1e3, norm="spectral", lifting_shift=0.0):
        model = self.model()
        grid = model.grid
        if operator == "generator":
            op, weights = wentzell_generator(model), grid.weights(Space.FULL_GRID)
        elif operator == "A0":
            op, weights = model.A0, grid.weights(Space.INTERIOR_GRID)
        else:
            opmat = operator_matrix(model, lifting_shift, cache=self.cache())
            if operator == "G0":
                op, weights = opmat.G0, grid.weights(Space.INTERIOR_GRID)
            else:
                op, weights = opmat.N, grid.weights(Space.BOUNDARY)
        report = sector_angle_estimate(
            op, shift=shift, threshold=threshold, norm=norm, weights=weights, quiet=self.quiet
        )
        payload = {"operator": operator, "report": report}
        return payload, "N/A", {"ray_table": report.ray_table}

    def _run_relbound(self, lams=None, norm="sup"):
        model = self.model()
        report = relative_bound_probe(
            model.B.matrix[:, model.grid.interior], model.A0, lams, norm, self.quiet
        )
        verdict = "FAIL" if report.verdict == "FAIL" else "PASS"
        table = {"lam": report.lams, "value": report.values}
        return {"report": report}, verdict, {"relbound_table": table}

    def _run_evolve(self, ts=(0.1, 1.0, 10.0), shift=0.0):
        report = evolve_and_structure_check(self.model(), ts, shift, cache=self.cache())
        return report, report["verdict"], {}

    def _run_perturb_check(self, lams=(5.0, 10.0)):
        model = self.model()
        checks = []
        for lam in lams:
            lam = _to_complex(lam)
            checks.append(
                {
                    "identity": dirichlet_identity_check(model, lam),
                    "identity_swapped": dirichlet_identity_check(model, lam, swap=True),
                    "dtn_difference": dtn_difference_check(model, lam),
                }
            )
        ok = all(part["verdict"] == "PASS" for check in checks for part in check.values())
        return {"checks": checks}, "PASS" if ok else "FAIL", {}

    def _run_split_check(self, scenario="C_bounded", C=None, tolerance=0.1):
        if self.config["problem"]["kind"] == "disk":
            result = feedback_split_experiment(self.problem, scenario=scenario, tolerance=tolerance)
        else:
            model = self.model()
            split = split_feedback(
                model, C=None if C is None else [[_to_complex(v) for v in row] for row in C]
            )
            result = feedback_split_experiment(
                model, split, scenario, tolerance=tolerance, quiet=self.quiet
            )
        return result, result["verdict"], {}

    def _run_disk(self, epsilons=(1.0, 0.1, 0.01), ts=(0.0, 0.5, 1.0)):
        disk = self.problem
        identity = disk_wq_identity_check(disk)
        generation = disk_generation_report(disk, ts)
        tables = {"mode_table": generation.pop("table")}
        try:
            bound = disk_relative_bound(disk, epsilons)
            tables["M_eps_table"] = bound.pop("table")
        except BoundFails as e:
            bound = {"verdict": "FAIL", "explanation": str(e)}
        verdicts = (identity["verdict"], bound["verdict"])
        if "FAIL" in verdicts:
            verdict = "FAIL"
        elif "INCONCLUSIVE" in verdicts:
            verdict = "INCONCLUSIVE"
        else:
            verdict = "PASS"
        payload = {"identity": identity, "relative_bound": bound, "generation": generation}
        return payload, verdict, tables

    def _run_converge(self, target="dirichlet", lam=1.0, samples=8, x=None):
        if target == "dirichlet":
            x = None if x is None else np.array([_to_complex(v) for v in x])
            table = dirichlet_convergence(self.problem, self.grid_sizes, _to_complex(lam), x, quiet=self.quiet)
            order = table.order
            verdict = "PASS" if order is not None and order >= 1.7 else "FAIL"
        elif target == "dtn":
            table = dtn_convergence(self.problem, self.grid_sizes, _to_complex(lam), quiet=self.quiet)
            order = table.order
            verdict = "PASS" if order is not None and order >= 1.7 else "FAIL"
        else:
            table, verdict = similarity_convergence(
                self.problem, self.grid_sizes, samples, self.seed, self.quiet
            )
        return {"target": target, "convergence": table}, verdict, {"convergence": table}

    def _run_theorem31(self, shift=0.0, tolerance=0.1, threshold=1e3, include_pure_wentzell=False):
        record = theorem31_experiment(
            self.model(),
            shift=shift,
            tolerance=tolerance,
            threshold=threshold,
            include_pure_wentzell=include_pure_wentzell,
            quiet=self.quiet,
            cache=self.cache(),
        )
        summary = {
            name: {
                "lambda0": report.lambda0,
                "M": report.M,
                "angle_estimate": report.angle_estimate,
                "first_unbounded_theta": report.first_unbounded_theta,
                "monotonicity_violations": report.monotonicity_violations,
            }
            for name, report in record.reports.items()
        }
        payload = {
            "angles": record.angles,
            "sector": summary,
            "hille_yosida": {"lambda0": record.hille_yosida.lambda0, "M": record.hille_yosida.M},
            "relative_bound": {
                "slope": record.relative_bound.slope,
                "verdict": record.relative_bound.verdict,
            },
            "reference_angle": record.reference_angle,
            "minimizing_ray": record.minimizing_ray,
            "N": record.N,
            "shift": record.shift,
        }
        tables = {f"ray_table_{name}": report.ray_table for name, report in record.reports.items()}
        return payload, record.verdict, tables


def execute(config, command=None, seed=0, quiet=True):
    """Runs one experiment from a parsed config and returns its ReportEnvelope."""
    return WentzellLab(config, command=command, seed=seed, quiet=quiet).execute()


def exit_code(verdict):
    """Exit status for a verdict: 1 on FAIL, 0 otherwise."""
    return 1 if verdict == "FAIL" else 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="wentzell-lab",
        description="Numerical experiments for operators with generalized Wentzell boundary conditions",
    )
    parser.add_argument("command", choices=COMMANDS, help="experiment to run")
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--format", default=None, help="comma-separated subset of json,csv")
    parser.add_argument("--seed", default=0, type=int, help="seed for sampled checks")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        formats = parse_formats(args.format) if args.format else None
        lab = WentzellLab(config, command=args.command, seed=args.seed, quiet=args.quiet)
        envelope = lab.execute()
        lab.save_report(args.out, formats)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (WentzellError, ValueError, np.linalg.LinAlgError, OverflowError) as e:
        print(f"{args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 3

    if not args.quiet:
        print(f"{args.command}: {envelope.verdict}")
    return exit_code(envelope.verdict)


if __name__ == "__main__":
    sys.exit(main())
