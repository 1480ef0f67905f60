"""Parameter sweeps with branch tracking, and batched dynamics runs.

Grid points and batch items are independent; with more than one worker they
run in a process pool and are merged back in input order. The worker count
comes from the ``workers`` argument or the ``MAGNOEP_WORKERS`` environment
variable (default 1).
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dynamics import EnvelopeFit, Trajectory, fit_envelope, integrate, max_step
from .errors import AmbiguousPhase, MagnoEPError, NoSignChange, NotPseudoHermitian
from .model import (
    DynamicsMatrix,
    SymmetryClass,
    ThreeModeModel,
    TwoModeModel,
    dynamics_matrix,
    replace_param,
    symmetry_class,
)
from .spectra import (
    EP_TOL,
    ComplexEigenvalue,
    ModelKind,
    Spectrum,
    classify_phase,
    coalescence,
    ep_indicator,
    ep_order_at,
    locate_ep,
    model_scale,
    spectrum,
)

WORKERS_ENV = "MAGNOEP_WORKERS"
# two assignments closer than this (relative) are a tie
AMBIGUITY_TOL = 1e-12
REFINE_FRACTION = 50
REFINE_POINTS = 10
REFINE_ROUNDS = 3


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def _ordered_map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


@dataclass(frozen=True)
class SweepSpec:
    base_model: Union[TwoModeModel, ThreeModeModel]
    param: str
    values: tuple
    symmetry: Optional[SymmetryClass] = None

    def __post_init__(self):
        values = tuple(float(v) for v in np.atleast_1d(self.values))
        if not values:
            raise ValueError("sweep needs at least one value")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("sweep values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        if self.symmetry is None:
            object.__setattr__(self, "symmetry", symmetry_class(self.base_model))

    def model_at(self, value: float):
        return replace_param(self.base_model, self.param, value)


@dataclass(frozen=True)
class BranchSet:
    param_values: tuple
    branches: tuple
    phase_labels: tuple
    ep_hits: tuple
    continuity_constant: float
    ambiguous_points: tuple = field(default=())
    param_name: str = "j"

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def values(self, branch: int) -> np.ndarray:
        return np.array([e.value for e in self.branches[branch]])


def _spectrum_values(args):
    spec, value = args
    return spec.model_at(value), spectrum(spec.model_at(value)).values


def _indicator(model):
    try:
        return ep_indicator(model)
    except NotPseudoHermitian:
        return None


def _find_eps(spec: SweepSpec, values, indicators, gaps):
    """EP hits from indicator sign changes, then refined coalescence minima."""
    hits = []
    brackets = []
    for i, (f0, f1) in enumerate(zip(indicators, indicators[1:])):
        if f0 is None or f1 is None:
            continue
        if f0 == 0:
            hits.append((values[i], ep_order_at(spec.model_at(values[i]))))
        elif f1 != 0 and np.sign(f0) != np.sign(f1):
            brackets.append((values[i], values[i + 1]))
    if indicators and indicators[-1] == 0:
        hits.append((values[-1], ep_order_at(spec.model_at(values[-1]))))
    for lo, hi in brackets:
        hits.append(locate_ep(spec.base_model, spec.param, (lo, hi)))

    # touching zeros leave no sign change; look for dips in coalescence instead
    for i in range(1, len(values) - 1):
        if indicators[i] is None or not (gaps[i] < gaps[i - 1] and gaps[i] <= gaps[i + 1]):
            continue
        if any(lo <= values[i] <= hi for lo, hi in brackets):
            continue
        lo, hi = values[i - 1], values[i + 1]
        for _ in range(REFINE_ROUNDS):
            grid = np.linspace(lo, hi, REFINE_POINTS + 2)
            g = [coalescence(spectrum(spec.model_at(v)).values) for v in grid]
            k = int(np.argmin(g))
            lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        carrier = np.max(np.abs(spectrum(spec.model_at(grid[k])).values.real))
        if min(g) <= 10 * EP_TOL * carrier:
            try:
                hits.append(locate_ep(spec.base_model, spec.param, (lo, hi)))
            except NoSignChange:
                pass

    hits.sort()
    scale = max(model_scale(spec.base_model), abs(values[-1] - values[0]), np.finfo(float).tiny)
    unique = []
    for v, order in hits:
        if not unique or abs(v - unique[-1][0]) > 1e-9 * scale:
            unique.append((float(v), int(order)))
    return tuple(unique)


def _refined_grid(values, ep_hits, spacing):
    """Insert points so intervals that contain an EP are finer than ``spacing``."""
    out = list(values)
    for v, _ in ep_hits:
        i = int(np.searchsorted(values, v))
        if i == 0 or i == len(values):
            continue
        lo, hi = values[i - 1], values[i]
        n = int(math.ceil((hi - lo) / spacing))
        if n > 1:
            out.extend(np.linspace(lo, hi, n + 1)[1:-1].tolist())
        if lo < v < hi:
            out.append(v)
    return tuple(sorted(set(out)))


def _track(spectra_values, scale):
    """Assign eigenvalues to branches point by point by optimal matching."""
    n = len(spectra_values[0])
    tracked = [np.asarray(spectra_values[0])]
    ambiguous = []
    perm_prev = tuple(range(n))
    for idx in range(1, len(spectra_values)):
        prev, new = tracked[-1], np.asarray(spectra_values[idx])
        cost = np.abs(prev[:, None] - new[None, :])
        rows, cols = linear_sum_assignment(cost)
        best = cost[rows, cols].sum()
        tied = [
            p for p in itertools.permutations(range(n))
            if cost[np.arange(n), list(p)].sum() - best <= AMBIGUITY_TOL * scale
        ]
        if len(tied) > 1:
            ambiguous.append(idx)
            perm = perm_prev if perm_prev in tied else tied[0]
        else:
            perm = tuple(int(c) for c in cols[np.argsort(rows)])
        tracked.append(new[list(perm)])
        perm_prev = perm
    return np.array(tracked), tuple(ambiguous)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> BranchSet:
    """Spectra along ``spec.values`` with continuous branches and EP locations."""
    workers = worker_count(workers)
    coarse = spec.values
    first = _ordered_map(_spectrum_values, [(spec, v) for v in coarse], workers)
    indicators = [_indicator(m) for m, _ in first]
    gaps = [coalescence(vals) for _, vals in first]
    ep_hits = _find_eps(spec, coarse, indicators, gaps)

    scale = max(model_scale(spec.base_model), np.finfo(float).tiny)
    grid = _refined_grid(coarse, ep_hits, scale / REFINE_FRACTION)
    done = dict(zip(coarse, (vals for _, vals in first)))
    extra = [v for v in grid if v not in done]
    for v, (_, vals) in zip(extra, _ordered_map(_spectrum_values, [(spec, v) for v in extra], workers)):
        done[v] = vals
    spectra_values = [done[v] for v in grid]

    carrier = max(np.max(np.abs(vals)) for vals in spectra_values)
    tracked, ambiguous = _track(spectra_values, max(carrier, scale))
    branches = tuple(
        tuple(ComplexEigenvalue(v.real, -v.imag, b) for v in tracked[:, b])
        for b in range(tracked.shape[1])
    )
    labels = []
    kind = ModelKind.TWO_MODE if tracked.shape[1] == 2 else ModelKind.THREE_MODE
    for i in range(len(grid)):
        try:
            labels.append(classify_phase(Spectrum.from_values(tracked[i], kind), spec.symmetry))
        except AmbiguousPhase:
            labels.append(None)

    steps = np.diff(np.array(grid))
    if len(grid) > 1:
        jumps = np.abs(np.diff(tracked, axis=0)).max(axis=1)
        continuity = float(np.max(jumps / steps))
    else:
        continuity = 0.0
    return BranchSet(
        param_values=tuple(grid),
        branches=branches,
        phase_labels=tuple(labels),
        ep_hits=ep_hits,
        continuity_constant=continuity,
        ambiguous_points=ambiguous,
        param_name=spec.param,
    )


# -- dynamics batches -------------------------------------------------------


@dataclass(frozen=True)
class BatchResult:
    trajectory: Optional[Trajectory]
    fits: dict
    error: Optional[str] = None
    fit_errors: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None


def _mechanical_labels(labels):
    return [lab for lab in ("q1", "q2") if lab in labels]


def _run_item(args):
    item, t_max, dt, substeps = args
    model, x0 = item
    try:
        a = model if isinstance(model, DynamicsMatrix) else dynamics_matrix(model)
        step = dt if dt is not None else max_step(a) / 10
        tr = integrate(a, x0, t_max, step, substeps=substeps)
        fits, fit_errors = {}, {}
        for lab in _mechanical_labels(tr.labels):
            try:
                fits[lab] = fit_envelope(tr, lab)
            except MagnoEPError as exc:
                fits[lab] = None
                fit_errors[lab] = str(exc)
        return BatchResult(tr, fits, fit_errors=fit_errors)
    except (MagnoEPError, ValueError, np.linalg.LinAlgError) as exc:
        return BatchResult(None, {}, f"{type(exc).__name__}: {exc}")


def run_dynamics_batch(
    items: Sequence,
    t_max: float,
    dt: float | None = None,
    substeps: int = 1,
    workers: int | None = None,
) -> list[BatchResult]:
    """Integrate each ``(model_or_matrix, initial_state)`` and fit ``q1``/``q2``.

    Integration failures are reported per item in ``BatchResult.error`` and
    envelope-fit failures per label in ``BatchResult.fit_errors`` (the fit is
    then ``None``); the batch always completes. ``dt=None`` uses a tenth of each item's sampling limit.
    """
    jobs = [(item, t_max, dt, substeps) for item in items]
    return _ordered_map(_run_item, jobs, worker_count(workers))


__all__ = [
    "BatchResult",
    "BranchSet",
    "EnvelopeFit",
    "SweepSpec",
    "run_dynamics_batch",
    "run_sweep",
    "worker_count",
]
