"""File output: delimited tables, JSON summaries, and the feedback-law format.

CSV cells carry 17 significant digits so downstream comparisons can be made
at full double precision; JSON numbers round-trip exactly (shortest-repr
serialization), which is what makes a saved law replay bit-identically.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np

from .albrekht import FeedbackLaw
from .exceptions import ConfigError

LAW_FORMAT = "rodlqr-feedback-law"
LAW_VERSION = 1


def fmt(x) -> str:
    return f"{float(x):.17g}"


def write_table(path: Path, header: list[str], rows, fmt_mode: str = "csv") -> Path:
    """Write rows as CSV or a JSON array of objects, per ``fmt_mode``."""
    path = Path(path)
    if fmt_mode == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(c if isinstance(c, str) else fmt(c) for c in row))
        path = path.with_suffix(".csv")
        path.write_text("\n".join(lines) + "\n")
    elif fmt_mode == "json":
        payload = [
            {h: (c if isinstance(c, str) else float(c)) for h, c in zip(header, row)}
            for row in rows
        ]
        path = path.with_suffix(".json")
        path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        raise ConfigError(f"unknown output format: {fmt_mode}")
    return path


def write_matrix(path: Path, mat: np.ndarray, fmt_mode: str = "csv") -> Path:
    mat = np.asarray(mat)
    header = [f"c{j}" for j in range(mat.shape[1])]
    return write_table(path, header, mat.tolist(), fmt_mode)


def write_tensor(path: Path, t: np.ndarray, fmt_mode: str = "csv") -> Path:
    """Flattened symmetric tensor: canonical index columns plus the value."""
    t = np.asarray(t)
    d = t.ndim
    header = [f"n{k+1}" for k in range(d)] + ["value"]
    rows = []
    for idx in itertools.combinations_with_replacement(range(t.shape[0]), d):
        rows.append([str(i) for i in idx] + [t[idx]])
    return write_table(path, header, rows, fmt_mode)


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path).with_suffix(".json")
    path.write_text(json.dumps(payload, indent=2, default=_coerce) + "\n")
    return path


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _tensor_payload(t: np.ndarray) -> dict:
    d = t.ndim
    indices, values = [], []
    for idx in itertools.combinations_with_replacement(range(t.shape[0]), d):
        indices.append(list(idx))
        values.append(float(t[idx]))
    return {"indices": indices, "values": values}


def _tensor_from_payload(payload: dict, n: int, d: int) -> np.ndarray:
    t = np.zeros((n,) * d)
    for idx, v in zip(payload["indices"], payload["values"]):
        if len(idx) != d or any(not 0 <= i < n for i in idx):
            raise ConfigError(f"bad tensor index {idx} in law file")
        for perm in set(itertools.permutations(idx)):
            t[perm] = v
    return t


def save_law(path: Path, law: FeedbackLaw) -> Path:
    payload = {
        "format": LAW_FORMAT,
        "version": LAW_VERSION,
        "n_states": law.n_states,
        "degree": law.degree,
        "k1": [float(x) for x in law.k1],
    }
    if law.k2 is not None:
        payload["k2"] = _tensor_payload(law.k2)
    if law.k3 is not None:
        payload["k3"] = _tensor_payload(law.k3)
    path = Path(path).with_suffix(".json")
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def load_law(path: Path) -> FeedbackLaw:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read law file {path}: {exc}") from exc
    if payload.get("format") != LAW_FORMAT:
        raise ConfigError(f"{path} is not a feedback-law file")
    n = int(payload["n_states"])
    degree = int(payload["degree"])
    k1 = np.array(payload["k1"], dtype=float)
    if k1.shape != (n,):
        raise ConfigError("law file: k1 length does not match n_states")
    k2 = _tensor_from_payload(payload["k2"], n, 2) if "k2" in payload else None
    k3 = _tensor_from_payload(payload["k3"], n, 3) if "k3" in payload else None
    try:
        return FeedbackLaw(degree=degree, k1=k1, k2=k2, k3=k3)
    except ValueError as exc:
        raise ConfigError(f"law file: {exc}") from exc


def load_profile(path: Path, expected_len: int) -> np.ndarray:
    """Read an initial profile (one value per line, or a JSON array)."""
    text = Path(path).read_text().strip()
    try:
        if text.startswith("["):
            vals = [float(x) for x in json.loads(text)]
        else:
            vals = [
                float(line.split(",")[-1])
                for line in text.splitlines()
                if line.strip() and not line.lstrip().startswith("#")
            ]
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse profile file {path}: {exc}") from exc
    if len(vals) != expected_len:
        raise ConfigError(
            f"profile file {path} has {len(vals)} values, expected {expected_len}"
        )
    return np.array(vals)
