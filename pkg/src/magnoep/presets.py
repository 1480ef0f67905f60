"""Figure presets: named lists of explicit run configs.

A preset is only a list of ``(panel, config)`` pairs. :func:`run_preset` runs
each through :func:`magnoep.runner.run_config`, writes the panel's data file
next to the YAML config that reproduces it, and records everything in
``manifest.json``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from . import __version__
from .config import PRESETS, RunConfig, config_from_dict, config_to_dict, emit_config
from .dynamics import resolve_closed_form_coefficient
from .errors import MagnoEPError, SerializationError
from .runner import run_config, write_output

MANIFEST = "manifest.json"
MANIFEST_SCHEMA = 1
# draws used when a preset run re-derives the closed-form coefficient
COEFFICIENT_DRAWS = 1000

_R2 = math.sqrt(2.0)
_FIG3_STATE = [1.0, 0.0, 1.0, 0.0]
_FIG5_STATE = [20.0, 0.0, 20.0, 0.0, 10.0, 0.0]

PANELS = {
    "fig2": [
        ("a_b_pt", {"mode": "spectrum2", "gamma2_over_gamma1": -1.0, "j_over_gamma1": [0.0, 2.0, 401]}),
        ("c_d_dissipative", {"mode": "spectrum2", "gamma2_over_gamma1": 2.0, "j_over_gamma1": [0.0, 2.0, 401]}),
    ],
    "fig3": [
        (name, {"mode": "dynamics2", "gamma2_over_gamma1": g2, "j_over_gamma1": j,
                "t_max_periods": 100.0, "initial_state": _FIG3_STATE})
        for name, g2, j in (
            ("a_dissipative_ep", 2.0, 0.5),
            ("b_pt_broken", -1.0, 0.9),
            ("c_pt_ep", -1.0, 1.0),
            ("d_pt_unbroken", -1.0, 1.1),
        )
    ],
    "fig4": [
        ("a_b_degenerate", {"mode": "spectrum3", "delta_over_gamma1": 0.0, "j_over_gamma1": [0.0, 2.5, 501]}),
        ("c_d_nondegenerate", {"mode": "spectrum3", "delta_over_gamma1": 2.0, "j_over_gamma1": [0.0, 2.5, 501]}),
    ],
    "fig5": [
        (name, {"mode": "dynamics3", "delta_over_gamma1": d, "j_over_gamma1": j,
                "t_max_periods": 200.0, "initial_state": _FIG5_STATE})
        for name, d, j in (
            ("a_ph3_broken", 0.0, 0.9 / _R2),
            ("b_ph3", 0.0, 1.0 / _R2),
            ("c_ph3_unbroken", 0.0, 1.1 / _R2),
            ("d_ph2_broken", 2.0, 1.52),
            ("e_ph2", 2.0, 1.69),
            ("f_ph2_unbroken", 2.0, 1.86),
        )
    ],
}


def preset_configs(name: str, fmt: str = "csv") -> list[tuple[str, RunConfig]]:
    """The explicit configs behind preset ``name``."""
    if name not in PANELS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return [(panel, config_from_dict({**d, "format": fmt})) for panel, d in PANELS[name]]


def run_preset(name: str, out_dir, fmt: str = "csv", workers: int | None = None,
               coefficient_draws: int = COEFFICIENT_DRAWS) -> tuple[list[Path], dict]:
    """Write one data file and one config per panel plus a manifest.

    A panel that fails is recorded in the manifest with its error and the
    remaining panels still run. Returns the written paths and the manifest.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    panels = []
    for panel, cfg in preset_configs(name, fmt):
        stem = f"{name}_{panel}"
        cfg_path = out_dir / f"{stem}.yaml"
        cfg_path.write_text(emit_config(cfg), encoding="utf-8")
        written.append(cfg_path)
        entry = {"panel": panel, "config_file": cfg_path.name, "config": config_to_dict(cfg)}
        try:
            out = run_config(cfg, workers=workers)
            data_path = write_output(out, out_dir / f"{stem}.{fmt}")
            written.append(data_path)
            entry["data_file"] = data_path.name
            entry.update(out.summary())
        except (MagnoEPError, ValueError, ArithmeticError) as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
        panels.append(entry)

    manifest = {
        "schema_version": MANIFEST_SCHEMA,
        "kind": "preset_manifest",
        "preset": name,
        "package_version": __version__,
        "closed_form_coefficient": resolve_closed_form_coefficient(n_draws=coefficient_draws),
        "closed_form_draws": coefficient_draws,
        "panels": panels,
    }
    path = out_dir / MANIFEST
    try:
        text = json.dumps(manifest, allow_nan=False, indent=1)
    except ValueError as exc:
        raise SerializationError(str(exc)) from exc
    path.write_text(text + "\n", encoding="utf-8")
    written.append(path)
    return written, manifest
