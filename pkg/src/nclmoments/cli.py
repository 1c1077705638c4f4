"""Command-line interface.

One verb produces one artifact; verbs compose through files:

* ``moments``  — moment table of a state (JSON).
* ``criteria`` — determinant hierarchies and witnesses (JSON report).
* ``sweep``    — amplitude-squared squeezing witnesses over an
  ``(m, lambda)`` grid (CSV).
* ``qfunc``    — Husimi distribution on a square grid (CSV).
* ``simulate`` — forward measurement record for scheme a, b or c (JSON),
  optionally with seeded shot noise.
* ``invert``   — moment table (scheme a) or extracted moments (b, c)
  from a record produced by ``simulate``.

Exit codes: 0 success; 2 invalid input; 3 truncation or insufficient
moment order; 4 singular inversion; 10 (``criteria`` only) nonclassicality
witnessed by a negative classified determinant.  The default truncation
dimension is 64, overridable by the ``NCL_DEFAULT_DIM`` environment
variable or ``--dim``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .criteria import (
    BasisKind,
    DEFAULT_TOLERANCE,
    asq_min_max,
    determinant_hierarchy,
    s3,
)
from .errors import (
    InsufficientOrderError,
    NclError,
    NumericConsistencyError,
    SingularInversionError,
    TruncationError,
    ValidationError,
)
from .measurement import (
    LOConfig,
    add_shot_noise,
    scheme_a_invert,
    scheme_a_sample_and_fourier,
    scheme_b_extract,
    scheme_b_forward,
    scheme_c_extract,
    scheme_c_forward,
)
from .moments import moment_table
from .serialize import (
    detection_record_from_json,
    detection_record_to_json,
    fourier_record_from_json,
    fourier_record_to_json,
    parse_state_argument,
    read_json,
    report_to_json,
    table_to_json,
    write_csv,
    write_json,
)
from .states import make_ass_state

_DEFAULT_OUT = {
    "moments": "moments.json",
    "criteria": "criteria.json",
    "sweep": "sweep.csv",
    "qfunc": "qfunc.csv",
    "simulate": "record.json",
    "invert": "inverted.json",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one CLI invocation."""

    verb: str
    state: Optional[str]
    dim: int
    order: int
    phi: float
    kind: str
    nmax: int
    scheme: str
    depth: int
    lo_alpha: complex
    t0: float
    samples: Optional[float]
    seed: int
    out: str
    tolerance: float
    record: Optional[str]
    m_list: tuple[int, ...]
    lambda_range: tuple[float, float, float]
    grid_bound: float
    grid_n: int


def default_dim() -> int:
    raw = os.environ.get("NCL_DEFAULT_DIM")
    if raw is None:
        return 64
    try:
        dim = int(raw)
    except ValueError:
        raise ValidationError(
            f"NCL_DEFAULT_DIM must be an integer, got {raw!r}"
        ) from None
    if dim < 1:
        raise ValidationError("NCL_DEFAULT_DIM must be positive")
    return dim


def _parse_complex_pair(text: str, context: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValidationError(f"{context} must be 're' or 're,im', got {text!r}")


def _parse_int_list(text: str, context: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"{context} must be comma-separated integers") from None
    if not values:
        raise ValidationError(f"{context} must not be empty")
    return values

def _parse_range(text: str, context: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"{context} must be 'start,stop,step'")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"{context} must contain numbers") from None
    if step <= 0 or stop < start:
        raise ValidationError(f"{context} needs step > 0 and stop >= start")
    return start, stop, step


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nclmoments",
        description="Moment-based nonclassicality tests and homodyne-"
        "correlation measurement simulation for single-mode states.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p: argparse.ArgumentParser, state: bool = True) -> None:
        if state:
            p.add_argument(
                "--state",
                required=True,
                help="state spec: inline JSON or path to a JSON file",
            )
        p.add_argument("--dim", type=int, default=None, help="Fock truncation")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument(
            "--tolerance", type=float, default=DEFAULT_TOLERANCE,
            help="negativity threshold (scaled by matrix magnitude)",
        )

    p = sub.add_parser("moments", help="tabulate <a^dag^k a^l>")
    add_common(p)
    p.add_argument("--order", type=int, default=4, help="largest k and l")

    p = sub.add_parser("criteria", help="determinant hierarchies and witnesses")
    add_common(p)
    p.add_argument(
        "--kind", choices=["aa", "quad", "xn", "d2", "all"], default="all"
    )
    p.add_argument("--nmax", type=int, default=4, help="largest hierarchy order")
    p.add_argument("--phi", type=float, default=0.0, help="quadrature angle")

    p = sub.add_parser("sweep", help="witness sweep over (m, lambda)")
    add_common(p, state=False)
    p.add_argument("--m-list", default="2,3,4", help="comma-separated orders m")
    p.add_argument(
        "--lambda-range", default="1.05,2.0,0.05",
        help="'start,stop,step' grid for lambda",
    )

    p = sub.add_parser("qfunc", help="Husimi distribution on a grid")
    add_common(p)
    p.add_argument("--grid-bound", type=float, default=2.0, help="half-width")
    p.add_argument("--grid-n", type=int, default=41, help="points per axis")

    p = sub.add_parser("simulate", help="forward measurement record")
    add_common(p)
    p.add_argument("--scheme", choices=["a", "b", "c"], required=True)
    p.add_argument("--depth", type=int, default=2, help="scheme-a tree depth")
    p.add_argument("--nmax", type=int, default=4, help="scheme-a largest order")
    p.add_argument("--lo-alpha", default="3,0", help="oscillator amplitude 're,im'")
    p.add_argument("--t0", type=float, default=math.sqrt(0.5))
    p.add_argument("--samples", type=float, default=None, help="shot-noise samples")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("invert", help="recover moments from a record")
    add_common(p, state=False)
    p.add_argument("--record", required=True, help="record JSON from 'simulate'")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    dim = args.dim if getattr(args, "dim", None) is not None else default_dim()
    if dim < 1:
        raise ValidationError("--dim must be positive")
    out = args.out if args.out is not None else _DEFAULT_OUT[args.verb]
    samples = getattr(args, "samples", None)
    if samples is not None and samples < 1:
        raise ValidationError("--samples must be at least 1")
    tolerance = args.tolerance
    if tolerance <= 0:
        raise ValidationError("--tolerance must be positive")
    return RunConfig(
        verb=args.verb,
        state=getattr(args, "state", None),
        dim=dim,
        order=getattr(args, "order", 4),
        phi=getattr(args, "phi", 0.0),
        kind=getattr(args, "kind", "all"),
        nmax=getattr(args, "nmax", 4),
        scheme=getattr(args, "scheme", "a"),
        depth=getattr(args, "depth", 2),
        lo_alpha=_parse_complex_pair(getattr(args, "lo_alpha", "3,0"), "--lo-alpha"),
        t0=getattr(args, "t0", math.sqrt(0.5)),
        samples=samples,
        seed=getattr(args, "seed", 0),
        out=out,
        tolerance=tolerance,
        record=getattr(args, "record", None),
        m_list=_parse_int_list(getattr(args, "m_list", "2,3,4"), "--m-list"),
        lambda_range=_parse_range(
            getattr(args, "lambda_range", "1.05,2.0,0.05"), "--lambda-range"
        ),
        grid_bound=getattr(args, "grid_bound", 2.0),
        grid_n=getattr(args, "grid_n", 41),
    )


def verb_moments(config: RunConfig) -> int:
    state = parse_state_argument(config.state, config.dim)
    table = moment_table(state, config.order)
    write_json(config.out, table_to_json(table))
    n_mean = table.entry(1, 1).real
    a_mean = table.entry(0, 1)
    print(f"wrote {config.out}")
    print(f"n_mean = {n_mean:.12g}")
    print(f"a_mean = {a_mean.real:.12g}{a_mean.imag:+.12g}j")
    return 0


def verb_criteria(config: RunConfig) -> int:
    state = parse_state_argument(config.state, config.dim)
    kinds = (
        [BasisKind.AA, BasisKind.QUAD, BasisKind.XN, BasisKind.XN_WEIGHTED]
        if config.kind == "all"
        else [BasisKind(config.kind)]
    )
    reports = [
        determinant_hierarchy(
            state, kind, config.nmax, phi=config.phi, tolerance=config.tolerance
        )
        for kind in kinds
    ]
    doc = report_to_json(reports[0]) if len(reports) == 1 else [
        report_to_json(r) for r in reports
    ]
    write_json(config.out, doc)
    print(f"wrote {config.out}")
    verdict = False
    for report in reports:
        mark = (
            f"first negative at N={report.first_negative_order}"
            if report.nonclassical
            else "no negativity"
        )
        print(f"kind={report.kind.value}: {mark}")
        verdict = verdict or report.nonclassical
    return 10 if verdict else 0


def verb_sweep(config: RunConfig) -> int:
    start, stop, step = config.lambda_range
    count = int(round((stop - start) / step)) + 1
    lambdas = [start + i * step for i in range(count) if start + i * step <= stop + 1e-12]
    if any(lam <= 0 or abs(lam - 1.0) < 1e-12 for lam in lambdas):
        raise ValidationError("lambda grid must avoid 0 and the classical point 1")
    rows = []
    for m in sorted(config.m_list):
        for lam in lambdas:
            state, _ = make_ass_state(m, lam, config.dim)
            table = moment_table(state, 4)
            amin, amax = asq_min_max(table)
            rows.append(
                (lam, float(m), s3(table), amin, amax, table.entry(1, 1).real)
            )
    rows.sort(key=lambda row: (row[1], row[0]))
    write_csv(
        config.out,
        ["lambda", "m", "s3", "asq_min", "asq_max", "n_mean"],
        rows,
    )
    print(f"wrote {config.out} ({len(rows)} rows)")
    return 0


def verb_qfunc(config: RunConfig) -> int:
    from .states import q_function

    state = parse_state_argument(config.state, config.dim)
    axis = np.linspace(-config.grid_bound, config.grid_bound, config.grid_n)
    grid = axis[:, None] + 1j * axis[None, :]
    values = q_function(state, grid)
    rows = [
        (float(axis[i]), float(axis[j]), float(values[i, j]))
        for i in range(config.grid_n)
        for j in range(config.grid_n)
    ]
    write_csv(config.out, ["re_alpha", "im_alpha", "q_value"], rows)
    print(f"wrote {config.out} ({len(rows)} rows)")
    return 0


def verb_simulate(config: RunConfig) -> int:
    state = parse_state_argument(config.state, config.dim)
    lo = LOConfig(alpha=config.lo_alpha, t0=config.t0)
    if config.scheme == "a":
        record = scheme_a_sample_and_fourier(state, config.nmax, lo, config.depth)
        if config.samples is not None:
            record = add_shot_noise(record, config.samples, config.seed)
        doc = fourier_record_to_json(record)
    elif config.scheme == "b":
        record = scheme_b_forward(state, lo)
        if config.samples is not None:
            record = add_shot_noise(record, config.samples, config.seed)
        doc = {"scheme": "b", "record": detection_record_to_json(record)}
    else:
        record = scheme_c_forward(state, lo)
        blocked = scheme_c_forward(state, lo.blocked())
        if config.samples is not None:
            record = add_shot_noise(record, config.samples, config.seed)
            blocked = add_shot_noise(blocked, config.samples, config.seed + 1)
        doc = {
            "scheme": "c",
            "record": detection_record_to_json(record),
            "blocked": detection_record_to_json(blocked),
        }
    write_json(config.out, doc)
    print(f"wrote {config.out}")
    return 0


def verb_invert(config: RunConfig) -> int:
    doc = read_json(config.record)
    if not isinstance(doc, dict) or "scheme" not in doc:
        raise ValidationError("record file lacks a scheme tag")
    scheme = doc["scheme"]
    if scheme == "a":
        table = scheme_a_invert(fourier_record_from_json(doc))
        write_json(config.out, table_to_json(table))
        print(f"wrote {config.out}")
        print(f"n_mean = {table.entry(1, 1).real:.12g}")
    elif scheme == "b":
        moments = scheme_b_extract(detection_record_from_json(doc["record"]))
        write_json(config.out, moments)
        print(f"wrote {config.out}")
        print(f"n_mean = {moments['n']:.12g}")
    elif scheme == "c":
        moments = scheme_c_extract(
            detection_record_from_json(doc["record"]),
            detection_record_from_json(doc["blocked"]),
        )
        write_json(config.out, moments)
        print(f"wrote {config.out}")
        print(f"n_mean = {moments['n']:.12g}")
    else:
        raise ValidationError(f"unknown scheme tag {scheme!r} in record")
    return 0


_VERBS = {
    "moments": verb_moments,
    "criteria": verb_criteria,
    "sweep": verb_sweep,
    "qfunc": verb_qfunc,
    "simulate": verb_simulate,
    "invert": verb_invert,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return _VERBS[config.verb](config)
    except SingularInversionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (TruncationError, InsufficientOrderError, NumericConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, TruncationError) and exc.suggested_dim:
            print(f"hint: retry with --dim {exc.suggested_dim}", file=sys.stderr)
        return 3
    except NclError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
