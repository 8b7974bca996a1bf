"""JSON serialization for ensembles and measurements.

Complex matrices are stored row-major as nested lists of [re, im] pairs.
Parsing errors name the offending field path so malformed files can be
fixed without guesswork. The matching JSON Schemas ship under docs/.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .discrimination import Povm, PovmElement
from .ensemble import CqEnsemble, EnsembleEntry


def _complex_matrix_to_lists(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _parse_complex_matrix(obj, dim: int, path: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ValueError(f"{path}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != dim:
            raise ValueError(f"{path}[{r}]: expected {dim} entries")
        for c, cell in enumerate(row):
            if (not isinstance(cell, list) or len(cell) != 2
                    or not all(isinstance(x, (int, float)) for x in cell)):
                raise ValueError(f"{path}[{r}][{c}]: expected a [re, im] pair of numbers")
            out[r, c] = complex(cell[0], cell[1])
    return out


def _require_field(obj: dict, name: str, kind, path: str):
    if name not in obj:
        raise ValueError(f"{path}: missing required field {name!r}")
    value = obj[name]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValueError(f"{path}.{name}: expected a number, got {type(value).__name__}")
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ValueError(f"{path}.{name}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def ensemble_to_dict(ens: CqEnsemble) -> dict:
    return {
        "n_bits": ens.n_bits,
        "dim": ens.dim,
        "entries": [
            {"key": key, "prob": prob, "state": _complex_matrix_to_lists(state)}
            for key, prob, state in ens.entries
        ],
    }


def ensemble_from_dict(obj: dict) -> CqEnsemble:
    if not isinstance(obj, dict):
        raise ValueError("top level: expected a JSON object")
    n_bits = _require_field(obj, "n_bits", int, "top level")
    dim = _require_field(obj, "dim", int, "top level")
    raw_entries = _require_field(obj, "entries", list, "top level")
    entries = []
    for i, raw in enumerate(raw_entries):
        path = f"entries[{i}]"
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected an object")
        key = _require_field(raw, "key", str, path)
        prob = _require_field(raw, "prob", float, path)
        state = _parse_complex_matrix(raw.get("state"), dim, f"{path}.state") \
            if "state" in raw else None
        if state is None:
            raise ValueError(f"{path}: missing required field 'state'")
        entries.append(EnsembleEntry(key, prob, state))
    return CqEnsemble(n_bits=n_bits, entries=tuple(entries))


def povm_to_dict(povm: Povm) -> dict:
    return {
        "dim": povm.dim,
        "elements": [
            {"guess": guess, "operator": _complex_matrix_to_lists(op)}
            for op, guess in povm.elements
        ],
    }


def povm_from_dict(obj: dict) -> Povm:
    if not isinstance(obj, dict):
        raise ValueError("top level: expected a JSON object")
    dim = _require_field(obj, "dim", int, "top level")
    raw_elements = _require_field(obj, "elements", list, "top level")
    elements = []
    for i, raw in enumerate(raw_elements):
        path = f"elements[{i}]"
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected an object")
        guess = _require_field(raw, "guess", str, path)
        if "operator" not in raw:
            raise ValueError(f"{path}: missing required field 'operator'")
        op = _parse_complex_matrix(raw["operator"], dim, f"{path}.operator")
        elements.append(PovmElement(op, guess))
    return Povm(elements=tuple(elements))


def load_ensemble(path) -> CqEnsemble:
    with open(path, "r", encoding="utf-8") as handle:
        return ensemble_from_dict(json.load(handle))


def save_ensemble(ens: CqEnsemble, path) -> None:
    Path(path).write_text(dumps(ensemble_to_dict(ens)) + "\n", encoding="utf-8")


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, full float precision."""
    return json.dumps(obj, sort_keys=True, indent=2)
