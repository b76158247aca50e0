"""CSV/JSON readers and writers behind the CLI, plus the run manifest.

All output is deterministic: sorted JSON keys, repr-float formatting, no
wall-clock entropy. Undefined probabilities travel as empty CSV cells with
an explicit ``defined`` flag, or as JSON nulls.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .embedding import NeighborhoodSpec
from .errors import ValidationError
from .tensor import GridMeta
from .unseen import CountryRisk, RiskField, ThresholdMap

RISK_COLUMNS = (
    "pixel_row",
    "pixel_col",
    "p_community",
    "p_checkmate",
    "p_stalemate",
    "n_community_hits",
    "defined",
)


def _fmt(x: float) -> str:
    return repr(float(x))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def json_dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def write_manifest(out_path, command: str, config: dict, inputs: list, outputs: list) -> Path:
    manifest = {
        "command": command,
        "config": config,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": {str(p): sha256_file(p) for p in outputs},
    }
    path = Path(str(out_path) + ".manifest.json")
    json_dump(manifest, path)
    return path


# ---------------------------------------------------------------------------
# Risk fields
# ---------------------------------------------------------------------------


def write_risk_csv(risks: RiskField, path) -> None:
    h, w = risks.p_community.shape
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(RISK_COLUMNS)
        for r in range(h):
            for c in range(w):
                defined = bool(risks.defined[r, c])
                out.writerow(
                    [
                        r,
                        c,
                        _fmt(risks.p_community[r, c]),
                        _fmt(risks.p_checkmate[r, c]) if defined else "",
                        _fmt(risks.p_stalemate[r, c]) if defined else "",
                        int(risks.community_counts[r, c]),
                        "true" if defined else "false",
                    ]
                )


def read_risk_csv(path) -> RiskField:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty risk table")
    h = max(int(r["pixel_row"]) for r in rows) + 1
    w = max(int(r["pixel_col"]) for r in rows) + 1
    p_comm = np.zeros((h, w))
    p_check = np.full((h, w), np.nan)
    p_stale = np.full((h, w), np.nan)
    counts = np.zeros((h, w), dtype=np.int64)
    for r in rows:
        i, j = int(r["pixel_row"]), int(r["pixel_col"])
        p_comm[i, j] = float(r["p_community"])
        counts[i, j] = int(r["n_community_hits"])
        if r["defined"] == "true":
            p_check[i, j] = float(r["p_checkmate"])
            p_stale[i, j] = float(r["p_stalemate"])
    # Unnormalized probabilities factor exactly through the normalized ones.
    p_target = np.where(np.isfinite(p_check), p_check * p_comm, 0.0)
    p_stale_u = np.where(np.isfinite(p_stale), p_stale * p_comm, 0.0)
    return RiskField(
        p_community=p_comm,
        p_checkmate=p_check,
        p_stalemate=p_stale,
        p_target_unnorm=p_target,
        p_stalemate_unnorm=p_stale_u,
        community_counts=counts,
        n_snapshots=0,
    )


# ---------------------------------------------------------------------------
# Threshold maps
# ---------------------------------------------------------------------------


def _nan_to_none(arr: np.ndarray):
    return [[None if not np.isfinite(v) else float(v) for v in row] for row in arr]


def write_thresholds_json(thr: ThresholdMap, path) -> None:
    payload = {
        "record_years": thr.record_years,
        "neighborhood": {"kind": thr.neighborhood.kind, "radius": thr.neighborhood.radius},
        "offsets": [list(o) for o in thr.offsets],
        "alpha_target": [[float(v) for v in row] for row in thr.alpha_target],
        "alpha_neighbor": [
            _nan_to_none(thr.alpha_neighbor[:, :, k]) for k in range(len(thr.offsets))
        ],
        "target_exceed_prob": [[float(v) for v in row] for row in thr.target_exceed_prob],
    }
    json_dump(payload, path)


def read_thresholds_json(path) -> ThresholdMap:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    nb = NeighborhoodSpec(
        kind=payload["neighborhood"]["kind"], radius=payload["neighborhood"]["radius"]
    )
    offsets = tuple(tuple(o) for o in payload["offsets"])
    if offsets != nb.offsets():
        raise ValidationError(f"{path}: offsets do not match the declared neighborhood")
    alpha_target = np.asarray(payload["alpha_target"], dtype=np.float64)
    per_offset = [
        np.array(
            [[np.nan if v is None else v for v in row] for row in layer], dtype=np.float64
        )
        for layer in payload["alpha_neighbor"]
    ]
    return ThresholdMap(
        alpha_target=alpha_target,
        alpha_neighbor=np.stack(per_offset, axis=2),
        offsets=offsets,
        neighborhood=nb,
        record_years=int(payload["record_years"]),
        target_exceed_prob=np.asarray(payload["target_exceed_prob"], dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# Labels, indicators, country tables
# ---------------------------------------------------------------------------


def read_labels_csv(path, n_rows: int, n_cols: int) -> GridMeta:
    """CSV columns: pixel_row, pixel_col, country_id. Unlisted pixels stay unlabeled."""
    labels = np.full((n_rows, n_cols), None, dtype=object)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            r, c = int(row["pixel_row"]), int(row["pixel_col"])
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise ValidationError(f"{path}: pixel ({r},{c}) outside {n_rows}x{n_cols} grid")
            cid = row["country_id"].strip()
            labels[r, c] = cid if cid else None
    return GridMeta(n_rows=n_rows, n_cols=n_cols, pixel_labels=labels)


def write_country_csv(rows: list[CountryRisk], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(
            ["country_id", "n_pixels", "n_defined", "p_community", "p_checkmate", "p_stalemate"]
        )
        for row in rows:
            out.writerow(
                [
                    row.country_id,
                    row.n_pixels,
                    row.n_defined,
                    _fmt(row.p_community),
                    _fmt(row.p_checkmate) if np.isfinite(row.p_checkmate) else "",
                    _fmt(row.p_stalemate) if np.isfinite(row.p_stalemate) else "",
                ]
            )


def read_country_csv(path, column: str) -> dict[str, float]:
    out: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if column not in row:
                raise ValidationError(f"{path}: no column {column!r}")
            val = row[column].strip()
            out[row["country_id"]] = float(val) if val else float("nan")
    return out


def read_indicator_csv(path, column: str) -> dict[str, float]:
    """CSV columns: country_id, vulnerability, readiness (extra columns pass through)."""
    return read_country_csv(path, column)


# ---------------------------------------------------------------------------
# Generic small tables
# ---------------------------------------------------------------------------


def write_table_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
