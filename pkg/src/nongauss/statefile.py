"""Versioned JSON state files: nested arrays of [re, im] pairs."""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import StateValidationError
from .fock import FockState, validate_physical

FORMAT_VERSION = 1


def save_state(state: FockState, path, metadata=None):
    m = state.matrix
    doc = {
        "version": FORMAT_VERSION,
        "modes": state.n_modes,
        "cutoffs": list(state.cutoffs),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        "metadata": dict(metadata or {}),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_state(path):
    """Load and validate a state file; returns (FockState, metadata)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateValidationError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("version", "modes", "cutoffs", "matrix"):
        if key not in doc:
            raise StateValidationError(f"{path}: missing field {key!r}")
    if doc["version"] != FORMAT_VERSION:
        raise StateValidationError(f"{path}: unsupported version {doc['version']}")
    cutoffs = tuple(int(c) for c in doc["cutoffs"])
    if len(cutoffs) != int(doc["modes"]):
        raise StateValidationError(f"{path}: cutoffs do not match mode count")
    side = math.prod(cutoffs)
    raw = doc["matrix"]
    if len(raw) != side or any(len(row) != side for row in raw):
        raise StateValidationError(
            f"{path}: matrix side must equal prod(cutoffs) = {side}"
        )
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateValidationError(f"{path}: matrix entries must be [re, im] pairs") from exc
    if arr.shape != (side, side, 2):
        raise StateValidationError(f"{path}: matrix entries must be [re, im] pairs")
    matrix = arr[..., 0] + 1j * arr[..., 1]
    try:
        state = FockState(matrix, cutoffs=cutoffs)
        validate_physical(state)
    except StateValidationError:
        raise
    except Exception as exc:  # Hermiticity errors arrive as validation failures
        raise StateValidationError(f"{path}: {exc}") from exc
    return state, doc.get("metadata", {})
