"""Batch front door: validate ensembles, certify measurements, optimize.

File formats
------------
Ensemble JSON::

    {"dim": d, "states": [{"label": str, "prior": p, "matrix": M}, ...]}

where ``M`` is a dim x dim unit-trace density matrix with entries encoded
as ``[re, im]`` pairs; the loader multiplies each matrix by its prior.
POVM JSON uses the same matrix encoding under an ``elements`` list, with
the operators stored directly (no prior weighting).

``optimize`` writes trace.csv, final_povm.json, and certificate.json into
the output directory; ``certify`` writes certificate.json only. Exit codes:
0 success, 2 validation failure, 3 numerical failure. All numbers are
written with 17 significant digits so outputs are bit-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError
from .iteration import IterationConfig, IterationTrace, run
from .model import (
    Ensemble,
    Povm,
    shifted_basis_ensemble,
    shifted_basis_povm,
    square_root_measurement,
    uniform_povm,
    validate_ensemble,
    validate_povm,
)
from .optimality import gap_upper_bound, residuals

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    example_shifted: int | None = None
    povm_path: str | None = None
    tol: float = 1e-8
    max_iters: int | None = None
    line_search: bool = True
    init: str = "uniform"
    init_file: str | None = None
    p_grid: tuple | None = None
    output_dir: str = "."
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValidationError("tol must be positive")
        if self.p_grid is not None:
            for p in self.p_grid:
                if not 0.0 <= p <= 1.0:
                    raise ValidationError(f"p_grid entries must lie in [0, 1], got {p}")


# -- JSON helpers -----------------------------------------------------------


def _format_float(value: float) -> str:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise NumericalError("cannot serialize a non-finite number")
    return format(value, ".17g")


def _dump_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(key)}: {_dump_json(val, indent + 1)}"
            for key, val in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{_dump_json(val, indent + 1)}" for val in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)!r}")


def _encode_matrix(matrix: np.ndarray):
    return [[[float(entry.real), float(entry.imag)] for entry in row] for row in matrix]


def _decode_matrix(obj, dim: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ValidationError(f"{where}: expected {dim} matrix rows")
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != dim:
            raise ValidationError(f"{where}: row {i} must have {dim} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(part, (int, float)) for part in entry)
            ):
                raise ValidationError(
                    f"{where}: entry ({i},{j}) must be a [re, im] pair"
                )
            out[i, j] = complex(entry[0], entry[1])
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{where}: matrix has non-finite entries")
    return out


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be a JSON object")
    return doc


def parse_ensemble_file(path) -> Ensemble:
    """Load and validate a prior-weighted ensemble from JSON."""
    doc = _load_json(path)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"{path}: 'dim' must be a positive integer")
    entries = doc.get("states")
    if not isinstance(entries, list) or not entries:
        raise ValidationError(f"{path}: 'states' must be a non-empty list")
    matrices, priors, labels = [], [], []
    for k, entry in enumerate(entries):
        where = f"{path}: states[{k}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where} must be an object")
        prior = entry.get("prior")
        if not isinstance(prior, (int, float)) or prior < 0:
            raise ValidationError(f"{where}: 'prior' must be a nonnegative number")
        matrix = _decode_matrix(entry.get("matrix"), dim, f"{where}: 'matrix'")
        unit_trace_defect = abs(float(np.trace(matrix).real) - 1.0)
        if unit_trace_defect > 1e-9:
            raise ValidationError(
                f"{where}: density matrix trace deviates from 1 by {unit_trace_defect:.3e}"
            )
        matrices.append(matrix)
        priors.append(float(prior))
        labels.append(str(entry.get("label", f"state_{k}")))
    ensemble = Ensemble.from_priors(matrices, priors, labels=labels)
    report = validate_ensemble(ensemble)
    if not report.ok:
        raise ValidationError(f"{path}: invalid ensemble\n{report.summary()}")
    return ensemble


def parse_povm_file(path, dim: int | None = None) -> Povm:
    """Load and validate a POVM from JSON."""
    doc = _load_json(path)
    file_dim = doc.get("dim")
    if not isinstance(file_dim, int) or file_dim < 1:
        raise ValidationError(f"{path}: 'dim' must be a positive integer")
    if dim is not None and file_dim != dim:
        raise ValidationError(f"{path}: POVM dim {file_dim} does not match ensemble dim {dim}")
    entries = doc.get("elements")
    if not isinstance(entries, list) or not entries:
        raise ValidationError(f"{path}: 'elements' must be a non-empty list")
    elements = []
    for k, entry in enumerate(entries):
        where = f"{path}: elements[{k}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where} must be an object")
        elements.append(_decode_matrix(entry.get("matrix"), file_dim, f"{where}: 'matrix'"))
    povm = Povm(dim=file_dim, elements=elements)
    report = validate_povm(povm)
    if not report.ok:
        raise ValidationError(f"{path}: invalid POVM\n{report.summary()}")
    return povm


def write_povm_json(povm: Povm, path, labels=None) -> None:
    elements = []
    for k, element in enumerate(povm.elements):
        label = labels[k] if labels is not None else f"outcome_{k}"
        elements.append({"label": label, "matrix": _encode_matrix(element)})
    Path(path).write_text(_dump_json({"dim": povm.dim, "elements": elements}) + "\n")


def write_certificate_json(path, p_succ, certificate, alpha_scalar, termination_reason) -> None:
    doc = {
        "p_succ": float(p_succ),
        "gap_lower": float(certificate.lower),
        "gap_upper": float(certificate.upper),
        "alpha_scalar": float(alpha_scalar),
        "p_used": float(certificate.p_used),
        "dim_used": int(certificate.dim_used),
        "termination_reason": termination_reason,
    }
    Path(path).write_text(_dump_json(doc) + "\n")


def write_trace_csv(trace: IterationTrace, path) -> None:
    lines = ["step,p_succ,t_max,ell,alpha,wall_ms"]
    for record in trace.records:
        lines.append(
            ",".join(
                [
                    str(record.step_index),
                    _format_float(record.p_succ_after),
                    _format_float(record.t_max),
                    str(record.ell),
                    _format_float(record.alpha_used),
                    format(record.wall_time * 1000.0, ".3f"),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


# -- commands ---------------------------------------------------------------


def _load_ensemble(config: RunConfig) -> Ensemble:
    if config.example_shifted is not None:
        if config.example_shifted < 2:
            raise ValidationError("--example-shifted needs at least 2 states")
        return shifted_basis_ensemble(config.example_shifted)
    if config.input_path is None:
        raise ValidationError("an ensemble file or --example-shifted is required")
    return parse_ensemble_file(config.input_path)


def _initial_povm(config: RunConfig, ensemble: Ensemble) -> Povm:
    if config.init == "uniform":
        return uniform_povm(ensemble.dim, ensemble.n_states)
    if config.init == "srm":
        return square_root_measurement(ensemble)
    if config.init == "file":
        if config.init_file is None:
            raise ValidationError("--init file requires --init-file")
        povm = parse_povm_file(config.init_file, dim=ensemble.dim)
        if povm.n_outcomes != ensemble.n_states:
            raise ValidationError(
                f"starting POVM has {povm.n_outcomes} outcomes, "
                f"ensemble has {ensemble.n_states} states"
            )
        return povm
    raise ValidationError(f"unknown init mode {config.init!r}")


def cmd_validate(config: RunConfig) -> int:
    ensemble = _load_ensemble(config)
    report = validate_ensemble(ensemble)
    print(report.summary())
    print(f"ensemble ok: dim={ensemble.dim}, states={ensemble.n_states}")
    return EXIT_OK


def cmd_certify(config: RunConfig) -> int:
    ensemble = _load_ensemble(config)
    if config.povm_path is not None:
        povm = parse_povm_file(config.povm_path, dim=ensemble.dim)
    elif config.example_shifted is not None:
        povm = shifted_basis_povm(config.example_shifted)
    else:
        raise ValidationError("certify requires --povm (or --example-shifted)")
    if povm.n_outcomes != ensemble.n_states:
        raise ValidationError(
            f"POVM has {povm.n_outcomes} outcomes, ensemble has {ensemble.n_states} states"
        )
    report = residuals(ensemble, povm)
    certificate = gap_upper_bound(ensemble, report, p_grid=config.p_grid)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_certificate_json(
        out_dir / "certificate.json",
        report.p_succ,
        certificate,
        report.alpha_scalar,
        None,
    )
    print(
        f"p_succ={report.p_succ:.12g} gap in [{certificate.lower:.12g}, "
        f"{certificate.upper:.12g}] alpha={report.alpha_scalar:.12g}"
    )
    return EXIT_OK


def cmd_optimize(config: RunConfig) -> int:
    ensemble = _load_ensemble(config)
    initial = _initial_povm(config, ensemble)
    iteration_config = IterationConfig(
        tol=config.tol,
        max_iters=config.max_iters,
        line_search=config.line_search,
        p_grid=config.p_grid,
    )
    trace = run(ensemble, initial, iteration_config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out_dir / "trace.csv")
    write_povm_json(trace.final_povm, out_dir / "final_povm.json", labels=ensemble.labels)
    write_certificate_json(
        out_dir / "certificate.json",
        trace.final_p_succ,
        trace.certificate,
        trace.final_report.alpha_scalar,
        trace.termination_reason,
    )
    print(
        f"{trace.termination_reason} after {len(trace.records)} steps: "
        f"p_succ={trace.final_p_succ:.12g} t_max={trace.final_t_max:.3g} "
        f"gap in [{trace.certificate.lower:.3g}, {trace.certificate.upper:.3g}]"
    )
    return EXIT_OK


def _parse_p_grid(text: str):
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse --p-grid {text!r}: {exc}") from exc
    if not values:
        raise ValidationError("--p-grid must contain at least one value")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="povmopt",
        description="Optimize and certify minimum-error discrimination measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("input", nargs="?", default=None, help="ensemble JSON file")
        p.add_argument(
            "--example-shifted",
            type=int,
            metavar="M",
            default=None,
            help="use the built-in M-state shifted-basis ensemble instead of a file",
        )
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--p-grid", default=None, help="comma-separated tail-mass budgets in [0,1]")
        p.add_argument("--seed", type=int, default=0, help="run seed recorded for provenance")

    p_validate = sub.add_parser("validate", help="check an ensemble file")
    add_common(p_validate)

    p_certify = sub.add_parser("certify", help="gap certificate for a given POVM")
    add_common(p_certify)
    p_certify.add_argument("--povm", default=None, help="POVM JSON file to certify")

    p_optimize = sub.add_parser("optimize", help="iterate to an optimal POVM")
    add_common(p_optimize)
    p_optimize.add_argument("--tol", type=float, default=1e-8, help="stopping residual")
    p_optimize.add_argument("--max-iters", type=int, default=None)
    p_optimize.add_argument(
        "--no-line-search",
        action="store_true",
        help="use the fixed guaranteed-increment step size",
    )
    p_optimize.add_argument(
        "--init",
        choices=("uniform", "srm", "file"),
        default="uniform",
        help="starting measurement",
    )
    p_optimize.add_argument("--init-file", default=None, help="POVM JSON for --init file")
    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        input_path=args.input,
        example_shifted=args.example_shifted,
        povm_path=getattr(args, "povm", None),
        tol=getattr(args, "tol", 1e-8),
        max_iters=getattr(args, "max_iters", None),
        line_search=not getattr(args, "no_line_search", False),
        init=getattr(args, "init", "uniform"),
        init_file=getattr(args, "init_file", None),
        p_grid=_parse_p_grid(args.p_grid) if args.p_grid else None,
        output_dir=args.out,
        seed=args.seed,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "certify": cmd_certify,
        "optimize": cmd_optimize,
    }
    try:
        config = _config_from_args(args)
        return handlers[args.command](config)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
