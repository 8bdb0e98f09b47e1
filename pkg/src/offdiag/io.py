"""File formats and the norm-tag grammar.

Matrices and experiment reports are JSON; profiles and ladders are CSV.
Complex entries serialize as [re, im] pairs with shortest round-trip
decimal representation (exact through 17 significant digits), and readers
reject NaN/Inf.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .approximation import ApproxProfile, JacksonLadder
from .core import DecayMatrix, IndexGeometry
from .errors import NormTagParseError, UsageError
from .norms import (
    ConvDom,
    Jaffard,
    NormTag,
    OperatorL2,
    Schur,
    SideDiagonalProfile,
    Weight,
    Weighted,
)
from .smoothness import TGrid

# ---------------------------------------------------------------------------
# Norm tag grammar:  opl2 | jaffard:<r> | schur:<r> | cd:<r>
#                  | weighted:<base>:poly:<r>
# ---------------------------------------------------------------------------


def _parse_param(token: str, position: int, name: str, minimum: float,
                 strict: bool) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NormTagParseError(f"expected a number after {name!r}", position)
    if value < minimum or (strict and value == minimum):
        op = ">" if strict else ">="
        raise NormTagParseError(
            f"{name} parameter must be {op} {minimum:g}, got {value:g}", position
        )
    return value


def parse_norm_tag(text: str) -> NormTag:
    """Parse a norm tag string; raises :class:`NormTagParseError` on errors.

    Tags round-trip through ``NormTag.format``.
    """
    if not text:
        raise NormTagParseError("empty norm tag", 0)
    tokens: list[tuple[str, int]] = []
    offset = 0
    for part in text.split(":"):
        tokens.append((part, offset))
        offset += len(part) + 1

    def parse_simple(i: int) -> tuple[NormTag, int]:
        name, pos = tokens[i]
        if name == "opl2":
            return OperatorL2(), i + 1
        if name in ("jaffard", "schur", "cd"):
            if i + 1 >= len(tokens):
                raise NormTagParseError(f"{name!r} needs a parameter", pos + len(name))
            param, ppos = tokens[i + 1]
            if name == "jaffard":
                return Jaffard(_parse_param(param, ppos, name, 0.0, True)), i + 2
            value = _parse_param(param, ppos, name, 0.0, False)
            return (Schur(value) if name == "schur" else ConvDom(value)), i + 2
        raise NormTagParseError(f"unknown norm tag {name!r}", pos)

    name, pos = tokens[0]
    if name == "weighted":
        if len(tokens) < 2:
            raise NormTagParseError("'weighted' needs a base tag", pos + len(name))
        base, i = parse_simple(1)
        if i >= len(tokens) or tokens[i][0] != "poly":
            bad = tokens[i] if i < len(tokens) else ("", len(text))
            raise NormTagParseError("expected 'poly' after the base tag", bad[1])
        if i + 1 >= len(tokens):
            raise NormTagParseError("'poly' needs a parameter", tokens[i][1] + 4)
        r = _parse_param(tokens[i + 1][0], tokens[i + 1][1], "poly", 0.0, False)
        tag, end = Weighted(base, Weight.polynomial(r)), i + 2
    else:
        tag, end = parse_simple(0)
    if end != len(tokens):
        raise NormTagParseError(f"trailing input {tokens[end][0]!r}", tokens[end][1])
    return tag


# ---------------------------------------------------------------------------
# Matrix JSON
# ---------------------------------------------------------------------------


def _reject_constant(name: str):
    raise UsageError(f"matrix file contains non-finite value {name}")


def write_matrix_json(a: DecayMatrix, path: str | Path) -> None:
    entries = [[z.real, z.imag] for z in a.entries.ravel()]
    payload = {"geometry": a.geometry.to_dict(), "entries": entries}
    with open(path, "w") as fh:
        json.dump(payload, fh, allow_nan=False)


def read_matrix_json(path: str | Path) -> DecayMatrix:
    with open(path) as fh:
        try:
            payload = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed matrix JSON {path}: {exc}") from exc
    try:
        geom = IndexGeometry.from_dict(payload["geometry"])
        raw = payload["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"matrix JSON {path} missing fields: {exc}") from exc
    m = geom.points
    if len(raw) != m * m:
        raise UsageError(
            f"matrix JSON {path} has {len(raw)} entries, expected {m * m}"
        )
    arr = np.array([complex(re, im) for re, im in raw]).reshape(m, m)
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise UsageError(f"matrix JSON {path} contains NaN/Inf entries")
    return DecayMatrix(geom, arr)


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------


def write_profile_csv(profile: SideDiagonalProfile, path: str | Path) -> None:
    """One row per difference index with nonzero value, ordered by index."""
    d = profile.geometry.d
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"m_{j + 1}" for j in range(d)] + ["value"])
        for m, v in profile.items():
            if v != 0.0:
                writer.writerow([*m, repr(v)])


def write_approx_csv(profile: ApproxProfile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "E_N", "norm_tag", "flag"])
        for n, err in profile.entries:
            writer.writerow([n, repr(err), profile.tag, profile.flag])


def write_jackson_csv(ladder: JacksonLadder, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "vdp_error", "modulus_estimate"])
        for n, err, omega in ladder.rows:
            writer.writerow([n, repr(err), repr(omega)])


def write_hz_breakdown_csv(d: int, rows: Iterable[tuple[tuple[float, ...], float]],
                           path: str | Path) -> None:
    """Per-probe seminorm terms: columns t_1..t_d, abs_t, value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"t_{j + 1}" for j in range(d)] + ["abs_t", "value"])
        for t, value in rows:
            abs_t = sum(abs(x) for x in t)
            writer.writerow([*(repr(x) for x in t), repr(abs_t), repr(value)])


# ---------------------------------------------------------------------------
# Grids and reports
# ---------------------------------------------------------------------------


def write_tgrid_json(grid: TGrid, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(grid.to_dict(), fh, allow_nan=False)


def read_tgrid_json(d: int, path: str | Path) -> TGrid:
    with open(path) as fh:
        try:
            data = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed grid JSON {path}: {exc}") from exc
    return TGrid.from_dict(d, data)


#: JSON schema of serialized experiment reports.  Consumers rely on the
#: stability of this field set; ``reason`` appears only on failed or
#: degenerate runs.
REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "kind", "spec", "geometry", "norms", "fits", "pass",
        "tolerances", "runtime_ms", "artifact_version",
    ],
    "additionalProperties": False,
    "properties": {
        "kind": {
            "enum": [
                "jaffard", "anisotropic", "banded_approx_inverse",
                "hz_cd", "quotient_rule", "jackson_bernstein",
            ]
        },
        "spec": {"type": "object"},
        "geometry": {
            "type": "object",
            "required": ["kind", "d", "size"],
            "properties": {
                "kind": {"enum": ["torus", "window"]},
                "d": {"type": "integer", "minimum": 1},
                "size": {"type": "integer", "minimum": 1},
            },
        },
        "norms": {"type": "object", "additionalProperties": {"type": "number"}},
        "fits": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["exponent", "intercept", "r_squared", "range"],
                "properties": {
                    "exponent": {"type": "number"},
                    "intercept": {"type": "number"},
                    "r_squared": {"type": "number", "minimum": 0, "maximum": 1},
                    "range": {"type": "array", "items": {"type": "integer"}},
                    "xs": {"type": "array", "items": {"type": "number"}},
                    "ys": {"type": "array", "items": {"type": "number"}},
                },
            },
        },
        "pass": {"type": "boolean"},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
        "runtime_ms": {"type": "number", "minimum": 0},
        "artifact_version": {"type": "string"},
        "reason": {"type": "string"},
    },
}


def write_report_json(report_dict: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(report_dict, fh, indent=2, allow_nan=False)


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON {path}: {exc}") from exc
