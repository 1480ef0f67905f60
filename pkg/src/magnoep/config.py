"""Run configuration: a single YAML mapping with a strict schema.

Keys (all optional except ``mode``/``preset``)::

    mode: spectrum2 | spectrum3 | dynamics2 | dynamics3 | dynamics_full | locate_ep | preset
    preset: fig2 | fig3 | fig4 | fig5          # implies mode: preset
    model: two_mode | three_mode              # locate_ep only
    omega_b: 6.283185307179586e7              # rad/s
    gamma1_over_omegab: 0.1
    gamma2_over_gamma1: -1.0                   # two-mode models
    delta_over_gamma1: 0.0                     # three-mode models
    j_over_gamma1: 1.0 | [start, stop, num]
    bracket: [lo, hi]                          # J/gamma_1, locate_ep
    kappa_over_g: 100.0                        # dynamics_full: |kappa| = ratio * G
    t_max_periods: 100.0
    samples_per_period: 200
    initial_state: [q1, p1, q2, p2, ...]
    output: path
    format: csv | json

Three-mode models sit on the pseudo-Hermitian manifold (``kappa_m =
-gamma_1``, ``delta_m = omega_1``, ``G_m = J``) with ``omega_2 = omega_b``
and ``omega_1 = omega_b + delta``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import yaml

from .errors import ParseError, ValidationError
from .model import PhysicalParams, ThreeModeModel, TwoModeModel

MODES = ("spectrum2", "spectrum3", "dynamics2", "dynamics3", "dynamics_full", "locate_ep", "preset")
PRESETS = ("fig2", "fig3", "fig4", "fig5")
FORMATS = ("csv", "json")
DEFAULT_OMEGA_B = 2 * math.pi * 1e7

DEFAULT_STATES = {
    "dynamics2": (1.0, 0.0, 1.0, 0.0),
    "dynamics3": (20.0, 0.0, 20.0, 0.0, 10.0, 0.0),
    "dynamics_full": (1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
}
STATE_SIZE = {"dynamics2": 4, "dynamics3": 6, "dynamics_full": 8}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    preset: Optional[str] = None
    model: str = "two_mode"
    omega_b: float = DEFAULT_OMEGA_B
    gamma1_over_omegab: float = 0.1
    gamma2_over_gamma1: float = -1.0
    delta_over_gamma1: float = 0.0
    j_over_gamma1: Union[float, tuple] = 1.0
    bracket: Optional[tuple] = None
    kappa_over_g: float = 100.0
    t_max_periods: float = 100.0
    samples_per_period: int = 200
    initial_state: Optional[tuple] = None
    output: Optional[str] = None
    format: str = "csv"

    # -- derived quantities -------------------------------------------------

    @property
    def gamma_1(self) -> float:
        return self.gamma1_over_omegab * self.omega_b

    @property
    def is_range(self) -> bool:
        return isinstance(self.j_over_gamma1, tuple)

    def j_values(self) -> np.ndarray:
        """Swept ``J/gamma_1`` values (a single value if not a range)."""
        if self.is_range:
            start, stop, num = self.j_over_gamma1
            return np.linspace(start, stop, int(num))
        return np.array([self.j_over_gamma1])

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega_b

    @property
    def dt(self) -> float:
        return self.period / self.samples_per_period

    @property
    def t_max(self) -> float:
        return self.t_max_periods * self.period

    def state(self) -> tuple:
        if self.initial_state is not None:
            return self.initial_state
        return DEFAULT_STATES[self.mode]

    def two_mode(self, j_over_gamma1: float | None = None) -> TwoModeModel:
        j = self.j_over_gamma1 if j_over_gamma1 is None else j_over_gamma1
        return TwoModeModel(
            omega_b=self.omega_b,
            gamma_1=self.gamma_1,
            gamma_2=self.gamma2_over_gamma1 * self.gamma_1,
            j=j * self.gamma_1,
        )

    def three_mode(self, j_over_gamma1: float | None = None) -> ThreeModeModel:
        j = self.j_over_gamma1 if j_over_gamma1 is None else j_over_gamma1
        return ThreeModeModel.pseudo_hermitian(
            omega_2=self.omega_b,
            delta=self.delta_over_gamma1 * self.gamma_1,
            gamma_1=self.gamma_1,
            j=j * self.gamma_1,
        )

    def physical(self) -> PhysicalParams:
        """Four-mode parameters whose elimination gives :meth:`two_mode`.

        ``G = |gamma| * kappa_over_g`` and ``kappa = sign(gamma) * kappa_over_g * G``,
        detunings zero (negligible next to ``kappa``).
        """
        r = self.kappa_over_g
        floor = 1e-3 * self.omega_b

        def pair(gamma):
            g = abs(gamma) * r
            kappa = math.copysign(r * g, gamma) if g > 0 else r * r * floor
            return g, kappa

        g_a, kappa_a = pair(self.gamma_1)
        g_m, kappa_m = pair(self.gamma2_over_gamma1 * self.gamma_1)
        return PhysicalParams(
            delta_a=0.0,
            delta_m=0.0,
            kappa_a=kappa_a,
            kappa_m=kappa_m,
            g_a_lin=g_a,
            g_m_lin=g_m,
            omega_1=self.omega_b,
            omega_2=self.omega_b,
            j=self.j_over_gamma1 * self.gamma_1,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _num(value, key, problems, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{key}: expected a number, got {value!r}")
        return None
    if not math.isfinite(value):
        problems.append(f"{key}: must be finite")
        return None
    if integer:
        if int(value) != value:
            problems.append(f"{key}: expected an integer, got {value!r}")
            return None
        return int(value)
    return float(value)


def _line_numbers(text):
    """Map top-level keys to 1-based source lines."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration.

    Raises ``ParseError`` for malformed YAML and ``ValidationError`` listing
    every violated constraint.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"malformed config{where}: {getattr(exc, 'problem', exc)}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParseError("config must be a mapping of keys to values")
    return config_from_dict(data, _line_numbers(text))


def config_from_dict(data: dict, lines: dict | None = None) -> RunConfig:
    lines = lines or {}
    problems = []

    def where(key):
        return f"{key} (line {lines[key]})" if key in lines else key

    unknown = [k for k in data if k not in _FIELDS]
    for k in unknown:
        problems.append(f"{where(k)}: unknown key")

    values = {}
    mode = data.get("mode")
    preset = data.get("preset")
    if mode is None and preset is not None:
        mode = "preset"
    if mode not in MODES:
        problems.append(f"{where('mode')}: must be one of {', '.join(MODES)}, got {mode!r}")
    values["mode"] = mode
    if preset is not None and preset not in PRESETS:
        problems.append(f"{where('preset')}: must be one of {', '.join(PRESETS)}, got {preset!r}")
    if mode == "preset" and preset is None:
        problems.append("preset: required when mode is preset")
    values["preset"] = preset

    for key in ("model", "format"):
        if key in data:
            allowed = ("two_mode", "three_mode") if key == "model" else FORMATS
            if data[key] not in allowed:
                problems.append(f"{where(key)}: must be one of {', '.join(allowed)}, got {data[key]!r}")
            values[key] = data[key]

    for key in ("omega_b", "gamma1_over_omegab", "gamma2_over_gamma1", "delta_over_gamma1",
                "kappa_over_g", "t_max_periods"):
        if key in data:
            values[key] = _num(data[key], where(key), problems)
    if "samples_per_period" in data:
        values["samples_per_period"] = _num(data["samples_per_period"], where("samples_per_period"),
                                            problems, integer=True)

    if "j_over_gamma1" in data:
        j = data["j_over_gamma1"]
        if isinstance(j, (list, tuple)):
            if len(j) != 3:
                problems.append(f"{where('j_over_gamma1')}: range must be [start, stop, num]")
            else:
                start = _num(j[0], where("j_over_gamma1") + "[0]", problems)
                stop = _num(j[1], where("j_over_gamma1") + "[1]", problems)
                num = _num(j[2], where("j_over_gamma1") + "[2]", problems, integer=True)
                if None not in (start, stop, num):
                    if num < 1:
                        problems.append(f"{where('j_over_gamma1')}: need at least one point")
                    elif num > 1 and not start < stop:
                        problems.append(f"{where('j_over_gamma1')}: range must be increasing")
                    if start < 0:
                        problems.append(f"{where('j_over_gamma1')}: coupling must be >= 0")
                values["j_over_gamma1"] = (start, stop, num)
        else:
            jv = _num(j, where("j_over_gamma1"), problems)
            if jv is not None and jv < 0:
                problems.append(f"{where('j_over_gamma1')}: coupling must be >= 0")
            values["j_over_gamma1"] = jv

    if "bracket" in data:
        b = data["bracket"]
        if not isinstance(b, (list, tuple)) or len(b) != 2:
            problems.append(f"{where('bracket')}: must be [lo, hi]")
        else:
            lo = _num(b[0], where("bracket") + "[0]", problems)
            hi = _num(b[1], where("bracket") + "[1]", problems)
            if lo is not None and hi is not None and not lo < hi:
                problems.append(f"{where('bracket')}: must satisfy lo < hi")
            values["bracket"] = (lo, hi)

    if "initial_state" in data:
        s = data["initial_state"]
        if not isinstance(s, (list, tuple)):
            problems.append(f"{where('initial_state')}: must be a list of numbers")
        else:
            nums = tuple(_num(v, where("initial_state"), problems) for v in s)
            values["initial_state"] = nums
            size = STATE_SIZE.get(mode)
            if size is not None and len(nums) != size:
                problems.append(f"{where('initial_state')}: {mode} needs {size} quadratures, got {len(nums)}")

    if "output" in data:
        if not isinstance(data["output"], str) or not data["output"]:
            problems.append(f"{where('output')}: must be a non-empty path string")
        values["output"] = data["output"]

    def check(key, ok, message):
        if values.get(key) is not None and not ok(values[key]):
            problems.append(f"{where(key)}: {message}")

    check("omega_b", lambda v: v > 0, "must be positive")
    check("gamma1_over_omegab", lambda v: v != 0, "must be nonzero")
    check("kappa_over_g", lambda v: v >= 1, "must be >= 1")
    check("t_max_periods", lambda v: v > 0, "must be positive")
    check("samples_per_period", lambda v: v >= 20, "must be >= 20")
    if mode in ("spectrum2", "spectrum3") and "j_over_gamma1" not in data:
        problems.append("j_over_gamma1: spectrum modes need a value or [start, stop, num] range")
    if mode in ("dynamics2", "dynamics3", "dynamics_full") and isinstance(values.get("j_over_gamma1"), tuple):
        problems.append(f"{where('j_over_gamma1')}: dynamics modes need a single value")
    if mode == "locate_ep" and "bracket" not in data and not isinstance(data.get("j_over_gamma1"), list):
        problems.append("bracket: locate_ep needs a bracket or a j_over_gamma1 range")

    if problems:
        raise ValidationError(problems)
    return RunConfig(**values)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {}
    for name in _FIELDS:
        value = getattr(cfg, name)
        if value is None:
            continue
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def emit_config(cfg: RunConfig) -> str:
    """YAML text that :func:`parse_config` turns back into ``cfg``."""
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)
