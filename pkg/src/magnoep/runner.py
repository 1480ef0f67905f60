"""Execute a :class:`RunConfig` and write its data file.

Every CLI mode and every preset panel goes through :func:`run_config`, so a
preset's output can always be reproduced from its explicit config.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union


from .config import RunConfig
from .dynamics import EnvelopeFit, Trajectory, fit_envelope, integrate, max_step
from .errors import MagnoEPError
from .export import BranchScaling, EPHit, TimeScaling, export
from .model import dynamics_matrix
from .spectra import locate_ep
from .sweep import BranchSet, SweepSpec, run_sweep

# RK4 substeps are sized to this fraction of the sampling limit
STEP_FRACTION = 10


@dataclass(frozen=True)
class RunOutput:
    config: RunConfig
    result: Union[BranchSet, Trajectory, EPHit]
    scaling: Optional[object] = None
    fits: dict = field(default_factory=dict)

    @property
    def ep_hits(self) -> list:
        """EP locations as ``(J/gamma_1, order)`` pairs."""
        g = self.config.gamma_1
        if isinstance(self.result, BranchSet):
            return [(v / g, order) for v, order in self.result.ep_hits]
        if isinstance(self.result, EPHit):
            return [(self.result.param_value / g, self.result.ep_order)]
        return []

    def summary(self) -> dict:
        """JSON-ready description used by manifests and ``--quiet``-less CLI output."""
        out = {"ep_hits": [{"j_over_gamma1": v, "order": o} for v, o in self.ep_hits]}
        if isinstance(self.result, Trajectory):
            out["truncated"] = bool(self.result.truncated)
            out["t_max_periods"] = self.config.t_max_periods
            out["samples_per_period"] = self.config.samples_per_period
            out["fits"] = {lab: fit_summary(f, self.config) for lab, f in self.fits.items()}
        return out


def fit_summary(fit: Optional[EnvelopeFit], cfg: RunConfig) -> Optional[dict]:
    if fit is None:
        return None
    return {
        "growth_class": fit.growth_class.value,
        "rate": fit.rate,
        "rate_over_gamma1": None if fit.rate is None else fit.rate / abs(cfg.gamma_1),
        "slope": fit.slope,
        "peak_amplitude": fit.peak_amplitude,
        "beat_period": fit.beat_period,
        "beat_period_over_carrier": None if fit.beat_period is None else fit.beat_period / cfg.period,
    }


def two_mode_scaling(cfg: RunConfig) -> BranchScaling:
    return BranchScaling(
        param_label="j_over_gamma1",
        param_scale=cfg.gamma_1,
        offset=0.0,
        scale=cfg.omega_b,
        re_label="freq_over_omegab",
        im_label="linewidth_over_omegab",
        linewidth=True,
    )


def three_mode_scaling(cfg: RunConfig) -> BranchScaling:
    # x = Lambda - omega_2 with omega_2 = omega_b
    return BranchScaling(
        param_label="j_over_gamma1",
        param_scale=cfg.gamma_1,
        offset=cfg.omega_b,
        scale=cfg.gamma_1,
        re_label="re_x_over_gamma1",
        im_label="im_x_over_gamma1",
        linewidth=False,
    )


def time_scaling(cfg: RunConfig) -> TimeScaling:
    return TimeScaling(time_label="t_periods", time_scale=cfg.omega_b / (2 * math.pi), units="carrier periods")


def _sweep(cfg: RunConfig, three: bool, workers) -> RunOutput:
    j = cfg.j_values()
    base = cfg.three_mode(float(j[0])) if three else cfg.two_mode(float(j[0]))
    result = run_sweep(SweepSpec(base, "j", tuple(j * cfg.gamma_1)), workers=workers)
    scaling = three_mode_scaling(cfg) if three else two_mode_scaling(cfg)
    return RunOutput(cfg, result, scaling)


def _dynamics(cfg: RunConfig) -> RunOutput:
    if cfg.mode == "dynamics2":
        model = cfg.two_mode()
    elif cfg.mode == "dynamics3":
        model = cfg.three_mode()
    else:
        model = cfg.physical()
    a = dynamics_matrix(model)
    limit = max_step(a)
    # the stiff auxiliary modes of the full model only need stability, not accuracy
    target = limit if cfg.mode == "dynamics_full" else limit / STEP_FRACTION
    substeps = max(1, math.ceil(cfg.dt / target * (1 - 1e-12)))
    tr = integrate(a, cfg.state(), cfg.t_max, cfg.dt, substeps=substeps)
    fits = {}
    for lab in ("q1", "q2", "qm"):
        if lab in tr.labels:
            try:
                fits[lab] = fit_envelope(tr, lab, omega_ref=cfg.omega_b)
            except MagnoEPError:
                fits[lab] = None
    return RunOutput(cfg, tr, time_scaling(cfg), fits)


def _locate(cfg: RunConfig) -> RunOutput:
    if cfg.bracket is not None:
        lo, hi = cfg.bracket
    else:
        lo, hi = cfg.j_values()[[0, -1]]
    three = cfg.model == "three_mode"
    base = cfg.three_mode(lo) if three else cfg.two_mode(lo)
    value, order = locate_ep(base, "j", (lo * cfg.gamma_1, hi * cfg.gamma_1))
    return RunOutput(cfg, EPHit("j", value, order, value / cfg.gamma_1))


def run_config(cfg: RunConfig, workers: int | None = None) -> RunOutput:
    """Compute the result a config asks for (no files written)."""
    if cfg.mode == "spectrum2":
        return _sweep(cfg, False, workers)
    if cfg.mode == "spectrum3":
        return _sweep(cfg, True, workers)
    if cfg.mode in ("dynamics2", "dynamics3", "dynamics_full"):
        return _dynamics(cfg)
    if cfg.mode == "locate_ep":
        return _locate(cfg)
    raise ValueError(f"mode {cfg.mode!r} is not a single run; use run_preset")


def write_output(out: RunOutput, path, fmt: str | None = None) -> Path:
    return export(out.result, fmt or out.config.format, path, out.scaling)


def default_filename(cfg: RunConfig, stem: str = "result") -> str:
    return f"{stem}.{cfg.format}"


__all__ = ["RunOutput", "run_config", "write_output", "fit_summary"]
