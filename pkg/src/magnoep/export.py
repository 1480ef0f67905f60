"""CSV and JSON writers for sweep, trajectory, phase and EP results.

CSV files start with ``#`` comment lines (units, EP hits), then a header row
and data rows with 17 significant digits, LF line endings. JSON files are
objects carrying ``schema_version`` and ``kind``; non-finite numbers are
refused.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import Trajectory
from .errors import SerializationError
from .spectra import PhaseReport
from .sweep import BranchSet

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EPHit:
    param_name: str
    param_value: float
    ep_order: int
    normalized_value: Optional[float] = None


@dataclass(frozen=True)
class BranchScaling:
    """How sweep data are normalized on export.

    The parameter is divided by ``param_scale``; each eigenvalue becomes
    ``(lambda - offset) / scale``. With ``linewidth=True`` the second column
    is ``-Im`` (linewidth), otherwise ``Im``.
    """

    param_label: str = "param"
    param_scale: float = 1.0
    offset: float = 0.0
    scale: float = 1.0
    re_label: str = "re"
    im_label: str = "im"
    linewidth: bool = False
    units: str = "rad/s"


@dataclass(frozen=True)
class TimeScaling:
    time_label: str = "t"
    time_scale: float = 1.0
    units: str = "s"
    columns: Optional[tuple] = None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _check_finite(arrays):
    for name, arr in arrays.items():
        if not np.all(np.isfinite(np.asarray(arr, dtype=float))):
            raise SerializationError(f"non-finite values in {name}")


def _write_csv(path, comments, header, rows):
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) if not isinstance(v, str) else v for v in row) for row in rows)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path, obj):
    try:
        text = json.dumps(obj, allow_nan=False, indent=1)
    except ValueError as exc:
        raise SerializationError(str(exc)) from exc
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _branch_columns(result: BranchSet, s: BranchScaling):
    param = np.asarray(result.param_values) / s.param_scale
    cols = {}
    for b in range(result.n_branches):
        z = (result.values(b) - s.offset) / s.scale
        cols[f"{s.re_label}_{b}"] = z.real
        cols[f"{s.im_label}_{b}"] = -z.imag if s.linewidth else z.imag
    return param, cols


def _label(report):
    return report.label.value if report is not None else "Ambiguous"


def export_branch_set(result: BranchSet, fmt: str, path, scaling: BranchScaling | None = None) -> Path:
    s = scaling or BranchScaling(param_label=result.param_name)
    param, cols = _branch_columns(result, s)
    _check_finite({s.param_label: param, **cols})
    hits = [
        {"param": float(v), "normalized": float(v / s.param_scale), "order": int(order)}
        for v, order in result.ep_hits
    ]
    path = Path(path)
    if fmt == "csv":
        comments = [
            f"units: {s.param_label} = {result.param_name} / {s.param_scale!r} {s.units}; "
            f"{s.re_label}, {s.im_label} = (eigenvalue - {s.offset!r}) / {s.scale!r}"
            + (" (linewidth = -Im)" if s.linewidth else ""),
        ]
        comments += [f"ep_hit: {s.param_label}={_fmt(h['normalized'])} order={h['order']}" for h in hits]
        if result.ambiguous_points:
            # rows where two branch assignments tie; the previous ordering was kept
            comments.append("branch_ambiguity_rows: " + " ".join(str(i) for i in result.ambiguous_points))
        header = [s.param_label, *cols, "phase", "coalescence"]
        rows = []
        for i in range(len(param)):
            rep = result.phase_labels[i]
            if rep is None:
                gap = ""
            else:
                gap = rep.coalescence / s.scale
                _check_finite({"coalescence": [gap]})
            rows.append([param[i], *(c[i] for c in cols.values()), _label(rep), gap])
        _write_csv(path, comments, header, rows)
    elif fmt == "json":
        obj = {
            "schema_version": SCHEMA_VERSION,
            "kind": "branch_set",
            "param_name": result.param_name,
            "param_label": s.param_label,
            "param_scale": s.param_scale,
            "value_offset": s.offset,
            "value_scale": s.scale,
            "second_column": "linewidth" if s.linewidth else "imag",
            "param_values": param.tolist(),
            "branches": [
                {"branch": b, s.re_label: cols[f"{s.re_label}_{b}"].tolist(),
                 s.im_label: cols[f"{s.im_label}_{b}"].tolist()}
                for b in range(result.n_branches)
            ],
            "phase_labels": [_label(r) for r in result.phase_labels],
            "ep_hits": hits,
            "ambiguous_points": list(result.ambiguous_points),
            "continuity_constant": result.continuity_constant,
        }
        _write_json(path, obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def export_trajectory(result: Trajectory, fmt: str, path, scaling: TimeScaling | None = None) -> Path:
    """Write a trajectory; a truncated run keeps only its finite samples."""
    s = scaling or TimeScaling()
    labels = list(s.columns) if s.columns is not None else list(result.labels)
    times = result.times * s.time_scale
    cols = {lab: result[lab] for lab in labels}
    _check_finite({s.time_label: times, **cols})
    path = Path(path)
    if fmt == "csv":
        comments = [f"units: {s.time_label} in {s.units}; quadratures dimensionless",
                    f"truncated: {str(result.truncated).lower()}"]
        rows = np.column_stack([times, *cols.values()])
        _write_csv(path, comments, [s.time_label, *labels], rows.tolist())
    elif fmt == "json":
        _write_json(path, {
            "schema_version": SCHEMA_VERSION,
            "kind": "trajectory",
            "time_label": s.time_label,
            "time_units": s.units,
            "times": times.tolist(),
            "labels": labels,
            "states": {lab: c.tolist() for lab, c in cols.items()},
            "truncated": bool(result.truncated),
        })
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def export_phase_report(result: PhaseReport, fmt: str, path) -> Path:
    _check_finite({"coalescence": [result.coalescence]})
    record = {
        "symmetry": result.symmetry.value,
        "label": result.label.value,
        "ep_order": int(result.ep_order),
        "coalescence": float(result.coalescence),
    }
    path = Path(path)
    if fmt == "csv":
        _write_csv(path, ["units: coalescence in rad/s"], list(record),
                   [[record["symmetry"], record["label"], record["ep_order"], record["coalescence"]]])
    elif fmt == "json":
        _write_json(path, {"schema_version": SCHEMA_VERSION, "kind": "phase_report", **record})
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def export_ep_hit(result: EPHit, fmt: str, path) -> Path:
    _check_finite({"param_value": [result.param_value]})
    record = {"param_name": result.param_name, "param_value": float(result.param_value),
              "normalized_value": None if result.normalized_value is None else float(result.normalized_value),
              "ep_order": int(result.ep_order)}
    path = Path(path)
    if fmt == "csv":
        norm = "" if record["normalized_value"] is None else record["normalized_value"]
        _write_csv(path, ["units: param_value in rad/s; normalized_value = param_value / gamma_1"],
                   list(record), [[record["param_name"], record["param_value"], norm, record["ep_order"]]])
    elif fmt == "json":
        _write_json(path, {"schema_version": SCHEMA_VERSION, "kind": "ep_hit", **record})
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def export(result, fmt: str, path, scaling=None) -> Path:
    """Write ``result`` as CSV or JSON, dispatching on its type."""
    if isinstance(result, BranchSet):
        return export_branch_set(result, fmt, path, scaling)
    if isinstance(result, Trajectory):
        return export_trajectory(result, fmt, path, scaling)
    if isinstance(result, PhaseReport):
        return export_phase_report(result, fmt, path)
    if isinstance(result, EPHit):
        return export_ep_hit(result, fmt, path)
    raise TypeError(f"cannot export {type(result).__name__}")
