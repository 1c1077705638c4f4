"""Flat-file exchange formats: state specs, tables, reports, records.

All JSON documents are emitted with sorted keys and two-space indentation,
so rerunning a deterministic computation produces byte-identical files.
Complex numbers are serialized as two-element ``[re, im]`` arrays.  CSV
files use a comma separator, ``.`` decimal point, a header row and 17
significant digits (enough for a lossless float round trip).
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .criteria import CriterionReport
from .errors import ValidationError
from .measurement import (
    GAMMA_KEYS,
    DetectionRecord,
    FourierRecord,
    LOConfig,
    scheme_a_phases,
)
from .moments import MomentTable
from .states import (
    State,
    make_coherent,
    make_fock,
    make_thermal,
    make_ass_state,
    apply_squeeze,
)

STATE_TYPES = ("fock", "coherent", "thermal", "squeezed_vacuum", "ass")


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(value: Any, context: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ValidationError(f"{context} must be a number or an [re, im] pair")


def _require_number(spec: Mapping[str, Any], key: str) -> float:
    value = spec.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"state spec field {key!r} must be a number")
    return float(value)


def state_from_spec(spec: Mapping[str, Any], default_dim: int = 64) -> State:
    """Construct a state from its JSON specification.

    ``{"type": "fock"|"coherent"|"thermal"|"squeezed_vacuum"|"ass",
    parameters per type, "dim": integer}``; parameters are ``n`` (fock),
    ``alpha`` (coherent), ``nbar`` (thermal), ``z`` (squeezed vacuum) and
    ``m``/``lambda`` (amplitude-squared squeezed).  ``dim`` is optional.
    """
    if not isinstance(spec, Mapping):
        raise ValidationError("state spec must be a JSON object")
    kind = spec.get("type")
    if kind not in STATE_TYPES:
        raise ValidationError(
            f"state spec type must be one of {STATE_TYPES}, got {kind!r}"
        )
    dim = spec.get("dim", default_dim)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError("state spec dim must be a positive integer")
    if kind == "fock":
        n = spec.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError("fock spec needs an integer n")
        return make_fock(n, dim)
    if kind == "coherent":
        alpha = complex_from_json(spec.get("alpha"), "coherent alpha")
        return make_coherent(alpha, dim)
    if kind == "thermal":
        return make_thermal(_require_number(spec, "nbar"), dim)
    if kind == "squeezed_vacuum":
        z = complex_from_json(spec.get("z"), "squeeze parameter z")
        return apply_squeeze(make_fock(0, dim), z)
    m = spec.get("m")
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValidationError("ass spec needs an integer m")
    lam = _require_number(spec, "lambda")
    state, _ = make_ass_state(m, lam, dim)
    return state


def parse_state_argument(arg: str, default_dim: int = 64) -> State:
    """Resolve a ``--state`` value: a JSON file path or an inline JSON object."""
    text = arg.strip()
    if not text.startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise ValidationError(
                f"state argument {arg!r} is neither inline JSON nor an existing file"
            )
        text = path.read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"state spec is not valid JSON: {exc}") from exc
    return state_from_spec(spec, default_dim)


# -- moment tables -----------------------------------------------------------


def table_to_json(table: MomentTable) -> dict[str, Any]:
    entries = []
    for k in range(table.max_order + 1):
        for l in range(k + 1):
            value = table.entry(k, l)
            entries.append({"k": k, "l": l, "re": value.real, "im": value.imag})
    return {"max_order": table.max_order, "entries": entries}


def table_from_json(doc: Mapping[str, Any]) -> MomentTable:
    try:
        max_order = int(doc["max_order"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed moment-table document: {exc}") from exc
    size = max_order + 1
    vals = np.zeros((size, size), dtype=complex)
    seen = set()
    for item in entries:
        k, l = int(item["k"]), int(item["l"])
        if k < l:
            raise ValidationError("table entries must satisfy k >= l")
        if (k, l) in seen:
            raise ValidationError(f"duplicate table entry ({k}, {l})")
        seen.add((k, l))
        vals[k, l] = complex(float(item["re"]), float(item["im"]))
        vals[l, k] = np.conj(vals[k, l])
    expected = {(k, l) for k in range(size) for l in range(k + 1)}
    if seen != expected:
        raise ValidationError("table document is missing entries")
    return MomentTable(max_order=max_order, values=vals, validate=False)


# -- reports -----------------------------------------------------------------


def report_to_json(report: CriterionReport) -> dict[str, Any]:
    return {
        "kind": report.kind.value,
        "phi": report.phi,
        "determinants": [
            {"N": n, "value": value} for n, value in report.determinants
        ],
        "witnesses": dict(report.witnesses),
        "first_negative_order": report.first_negative_order,
        "tolerance": report.tolerance,
    }


# -- LO config and measurement records ---------------------------------------


def lo_to_json(lo: LOConfig) -> dict[str, Any]:
    return {
        "alpha": complex_to_json(lo.alpha),
        "t0": lo.t0,
        "r0": complex_to_json(lo.r0),
    }


def lo_from_json(doc: Mapping[str, Any]) -> LOConfig:
    try:
        return LOConfig(
            alpha=complex_from_json(doc["alpha"], "lo alpha"),
            t0=float(doc["t0"]),
            r0=complex_from_json(doc["r0"], "lo r0"),
        )
    except KeyError as exc:
        raise ValidationError(f"LO config is missing field {exc}") from exc


def _subset_of_key(key: str) -> list[int]:
    return [int(ch) for ch in key[1:]]


def _key_of_subset(subset: Sequence[int]) -> str:
    key = "g" + "".join(str(int(i)) for i in subset)
    if key not in GAMMA_KEYS:
        raise ValidationError(f"unknown detector subset {list(subset)!r}")
    return key


def detection_record_to_json(record: DetectionRecord) -> dict[str, Any]:
    gammas = [
        {"subset": _subset_of_key(key), "value": record.gammas[key]}
        for key in GAMMA_KEYS
    ]
    return {"scheme": record.scheme, "lo": lo_to_json(record.lo), "gammas": gammas}


def detection_record_from_json(doc: Mapping[str, Any]) -> DetectionRecord:
    try:
        gammas = {
            _key_of_subset(item["subset"]): float(item["value"])
            for item in doc["gammas"]
        }
        return DetectionRecord(
            scheme=str(doc["scheme"]), lo=lo_from_json(doc["lo"]), gammas=gammas
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed detection record: {exc}") from exc


def fourier_record_to_json(record: FourierRecord) -> dict[str, Any]:
    samples = []
    for n in range(1, record.n_max + 1):
        phases = scheme_a_phases(n)
        for j in range(2 * n + 2):
            samples.append(
                {
                    "n": n,
                    "j": j,
                    "phi": float(phases[j]),
                    "value": record.samples[(n, j)],
                }
            )
    return {
        "scheme": "a",
        "depth": record.depth,
        "n_max": record.n_max,
        "lo": lo_to_json(record.lo),
        "samples": samples,
    }


def fourier_record_from_json(doc: Mapping[str, Any]) -> FourierRecord:
    try:
        samples = {
            (int(item["n"]), int(item["j"])): float(item["value"])
            for item in doc["samples"]
        }
        return FourierRecord.from_samples(
            depth=int(doc["depth"]),
            lo=lo_from_json(doc["lo"]),
            n_max=int(doc["n_max"]),
            samples=samples,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed phase-scan record: {exc}") from exc


# -- files -------------------------------------------------------------------


def write_json(path: Union[str, Path], doc: Any) -> None:
    """Write a JSON document deterministically (sorted keys, stable layout)."""
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n")


def read_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read JSON from {path}: {exc}") from exc


def format_float(value: float) -> str:
    """17-significant-digit decimal form, losslessly round-trippable."""
    if not math.isfinite(value):
        raise ValidationError(f"cannot serialize non-finite value {value!r}")
    return format(float(value), ".17g")


def write_csv(
    path: Union[str, Path],
    header: Sequence[str],
    rows: Sequence[Sequence[float]],
) -> None:
    """Comma-separated table with a header and 17-significant-digit floats."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValidationError(
                f"CSV row has {len(row)} fields, expected {len(header)}"
            )
        lines.append(",".join(format_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
