"""JSON/CSV encoding and ensemble/codebook parsing.

Complex numbers travel as ``[re, im]`` pairs. JSON output has sorted keys and
every float written with 17 significant digits, so identical results give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .coding import Codebook
from .ensemble import SignalEnsemble
from .errors import ConfigError


def _float_text(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite float {x!r} in JSON")
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_float_text(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_atomic(path, data, binary: bool = False) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb" if binary else "w", encoding=None if binary else "utf-8",
                       newline=None if binary else "") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- parsing -----------------------------------------------------------------

def parse_complex_vector(raw) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("state entries must be [re, im] pairs of numbers") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError(f"state must be a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def complex_pairs(vec) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=complex)]


def ensemble_from_dict(d: dict) -> SignalEnsemble:
    """Build an ensemble from ``{"alphabet_A", "alphabet_B", "p", "q",
    "states"}`` where ``states[i][j]`` lists the [re, im] amplitudes of the
    letter state for (alphabet_A[i], alphabet_B[j]). ``dim`` is optional and
    checked if present."""
    if not isinstance(d, dict):
        raise ConfigError("ensemble must be a JSON object")
    try:
        alpha_a = [str(x) for x in d["alphabet_A"]]
        alpha_b = [str(x) for x in d["alphabet_B"]]
        rows = d["states"]
        p, q = d["p"], d["q"]
    except KeyError as exc:
        raise ConfigError(f"ensemble is missing key {exc}") from None
    if len(rows) != len(alpha_a) or any(len(r) != len(alpha_b) for r in rows):
        raise ConfigError("states table must have one row per Alice letter and one entry per Bob letter")
    vecs = [[parse_complex_vector(v) for v in row] for row in rows]
    dims = {v.size for row in vecs for v in row}
    if len(dims) != 1:
        raise ConfigError(f"letter states have differing dimensions {sorted(dims)}")
    if "dim" in d and int(d["dim"]) != dims.pop():
        raise ConfigError("declared dim does not match the state vectors")
    try:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("p and q must be numeric lists") from None
    return SignalEnsemble(alpha_a, alpha_b, np.array(vecs, dtype=complex), p, q)


def ensemble_to_dict(e: SignalEnsemble) -> dict:
    return {
        "alphabet_A": list(e.alphabet_a),
        "alphabet_B": list(e.alphabet_b),
        "dim": e.dim,
        "p": [float(x) for x in e.p],
        "q": [float(x) for x in e.q],
        "states": [[complex_pairs(e.states[i, j]) for j in range(len(e.alphabet_b))]
                   for i in range(len(e.alphabet_a))],
    }


def split_string(s, alphabet) -> tuple:
    """Accept a list of letters, or a plain string when every label is one character."""
    if isinstance(s, str):
        if all(len(x) == 1 for x in alphabet):
            return tuple(s)
        raise ConfigError(f"string {s!r} is ambiguous for multi-character labels; give a list")
    return tuple(str(x) for x in s)


def codebook_from_dict(d: dict, e: SignalEnsemble) -> Codebook:
    try:
        alice = [split_string(s, e.alphabet_a) for s in d["alice_strings"]]
        bob = [split_string(s, e.alphabet_b) for s in d["bob_strings"]]
        L = int(d.get("length_L", len(alice[0]) if alice else 0))
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"malformed codebook: {exc}") from None
    return Codebook(L, alice, bob)


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
