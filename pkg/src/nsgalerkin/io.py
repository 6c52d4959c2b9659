"""Deterministic CSV/JSON emission.

Data files contain no timestamps; floats are written with 17 significant
digits (CSV) or Python's round-tripping repr (JSON). Run metadata goes to a
separate manifest.
"""
from __future__ import annotations

import hashlib
import json
import math
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TIMESERIES_HEADER = ("t", "energy", "dirichlet", "work", "balance_residual", "div_max")
GRONWALL_HEADER = ("t", "w_energy", "envelope")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return _write_text(Path(path), "\n".join(lines) + "\n")


def timeseries_rows(record) -> list[tuple[float, ...]]:
    """One row per stored snapshot step."""
    resid = record.balance_residual
    out = []
    for j, i in enumerate(record.snapshot_steps):
        out.append((record.times[i], record.energy[i], record.dirichlet[i], record.work[i],
                    resid[i], record.div_max[j]))
    return out


def write_timeseries(path: str | Path, record=None) -> Path:
    rows = [] if record is None else timeseries_rows(record)
    return write_csv(path, TIMESERIES_HEADER, rows)


def write_gronwall(path: str | Path, cert) -> Path:
    return write_csv(path, GRONWALL_HEADER, zip(cert.times, cert.w_energy, cert.envelope))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def write_certificate(path: str | Path, payload, config_hash: str | None = None) -> Path:
    if config_hash is not None:
        if isinstance(payload, list):
            payload = [{**p, "config_hash": config_hash} for p in payload]
        else:
            payload = {**payload, "config_hash": config_hash}
    return _write_text(Path(path), dumps(payload))


def write_json(path: str | Path, payload) -> Path:
    return _write_text(Path(path), dumps(payload))


def config_hash(canonical: str) -> str:
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(path: str | Path, config_hash_: str, artifacts: Sequence[str], extra: dict | None = None) -> Path:
    """Run metadata (environment, artifact list); excluded from determinism checks."""
    from datetime import datetime, timezone

    from . import __version__

    payload = {
        "config_hash": config_hash_,
        "artifacts": list(artifacts),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    payload.update(extra or {})
    return write_json(path, payload)
