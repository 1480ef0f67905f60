"""Time evolution of the quadrature equations and envelope diagnostics.

``integrate`` is a fixed-step classical RK4. For a linear autonomous system
one RK4 step is the matrix polynomial ``I + hA + (hA)^2/2 + (hA)^3/6 +
(hA)^4/24``, so the step matrix is formed once and applied in blocks of
precomputed powers. ``matrix_exponential_oracle`` is the exact propagator
used to check it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import StepTooLarge, TooShort
from .model import DynamicsMatrix, TwoModeModel, dynamics_matrix

OVERFLOW = 1e100
SAMPLES_PER_PERIOD = 200
# fixed coefficient of the two-mode closed form; resolve_closed_form_coefficient re-derives it
CLOSED_FORM_COEFFICIENT = 1
EP_LIMIT = 1e-6
_BLOCK = 128


@dataclass(frozen=True)
class InitialState:
    quadratures: np.ndarray

    def __post_init__(self):
        x = np.array(self.quadratures, dtype=float).ravel()
        if len(x) not in (4, 6, 8) or not np.all(np.isfinite(x)):
            raise ValueError("initial state needs 4, 6 or 8 finite quadratures")
        x.setflags(write=False)
        object.__setattr__(self, "quadratures", x)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    labels: tuple
    truncated: bool = False

    def __post_init__(self):
        if len(self.times) != self.states.shape[0]:
            raise ValueError("one state row per time sample")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for arr in (self.times, self.states):
            arr.setflags(write=False)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]


def _as_matrix(a) -> tuple[np.ndarray, tuple]:
    if isinstance(a, DynamicsMatrix):
        return a.entries, a.labels
    a = np.asarray(a, dtype=float)
    return a, tuple(f"x{i}" for i in range(a.shape[0]))


def _as_state(x0, n) -> np.ndarray:
    if isinstance(x0, InitialState):
        x0 = x0.quadratures
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"initial state has shape {x0.shape}, expected ({n},)")
    return x0


def max_step(a) -> float:
    """Sampling rule ``2*pi / (20 * max|eig(A)|)``."""
    a, _ = _as_matrix(a)
    w = np.max(np.abs(np.linalg.eigvals(a)))
    return math.inf if w == 0 else 2 * math.pi / (20 * w)


def rk4_step_matrix(a: np.ndarray, dt: float) -> np.ndarray:
    n = a.shape[0]
    m = dt * a
    step = np.eye(n)
    term = np.eye(n)
    for k in range(1, 5):
        term = term @ m / k
        step = step + term
    return step


def integrate(a, x0, t_max: float, dt: float, substeps: int = 1) -> Trajectory:
    """RK4 solution of ``dx/dt = A x`` sampled every ``dt`` on ``[0, t_max]``.

    Each sample interval is covered by ``substeps`` RK4 steps; the step
    ``dt / substeps`` must respect :func:`max_step`. A state component above
    ``1e100`` ends the run early; the trajectory is cut at the last
    finite-sized sample and flagged ``truncated``.
    """
    mat, labels = _as_matrix(a)
    x = _as_state(x0, mat.shape[0])
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_max < dt:
        raise ValueError("t_max must be at least one step")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    limit = max_step(mat)
    h = dt / substeps
    if h > limit * (1 + 1e-12):
        raise StepTooLarge(f"RK4 step {h:.4g} exceeds the sampling limit {limit:.4g}")
    n_steps = int(math.floor(t_max / dt + 1e-9))
    step = np.linalg.matrix_power(rk4_step_matrix(mat, h), substeps)
    block = min(_BLOCK, n_steps)
    powers = np.empty((block, *step.shape))
    powers[0] = step
    for k in range(1, block):
        powers[k] = step @ powers[k - 1]

    states = np.empty((n_steps + 1, len(x)))
    states[0] = x
    done = 0
    truncated = False
    while done < n_steps:
        count = min(block, n_steps - done)
        chunk = powers[:count] @ states[done]
        bad = np.nonzero(np.any(~(np.abs(chunk) <= OVERFLOW), axis=1))[0]
        if len(bad):
            count = int(bad[0])
            states[done + 1 : done + 1 + count] = chunk[:count]
            done += count
            truncated = True
            break
        states[done + 1 : done + 1 + count] = chunk
        done += count
    times = np.arange(done + 1) * dt
    return Trajectory(times, states[: done + 1].copy(), labels, truncated)


def matrix_exponential_oracle(a, x0, times) -> Trajectory:
    """``x(t) = expm(A t) x0`` at each requested time (scaling and squaring)."""
    mat, labels = _as_matrix(a)
    x = _as_state(x0, mat.shape[0])
    times = np.asarray(times, dtype=float)
    props = scipy.linalg.expm(times[:, None, None] * mat[None, :, :])
    return Trajectory(times.copy(), props @ x, labels)


def closed_form_two_mode(m: TwoModeModel, q10: float, q20: float, t, k: int = CLOSED_FORM_COEFFICIENT):
    """Mechanical displacements ``(q1(t), q2(t))`` for ``p1(0) = p2(0) = 0``.

    ``q1 = exp(-G+ t) {[cos(W t) - k G-/W sin(W t)] cos(wb t) q1(0)
    - k J/W sin(W t) sin(wb t) q2(0)}`` with ``W = sqrt(J^2 - G-^2)``, and
    ``q2`` follows by exchanging the modes (``G- -> -G-``). Both
    ``cos(W t)`` and ``sin(W t)/W`` are entire in ``W^2``, so a complex ``W``
    covers the broken phase; near ``W t = 0`` their series are used.
    """
    t = np.asarray(t, dtype=float)
    w2 = m.j**2 - m.gamma_minus**2
    omega = np.sqrt(complex(w2))
    wt = omega * t
    small = np.abs(wt) < EP_LIMIT
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_wt = np.where(small, 1 - w2 * t**2 / 2, np.cos(wt)).real
        sinc_t = np.where(small, t * (1 - w2 * t**2 / 6), np.sin(wt) / omega).real
    decay = np.exp(-m.gamma_plus * t)
    c, s = np.cos(m.omega_b * t), np.sin(m.omega_b * t)
    q1 = decay * ((cos_wt - k * m.gamma_minus * sinc_t) * c * q10 - k * m.j * sinc_t * s * q20)
    q2 = decay * ((cos_wt + k * m.gamma_minus * sinc_t) * c * q20 - k * m.j * sinc_t * s * q10)
    return q1, q2


def resolve_closed_form_coefficient(n_draws: int = 1000, seed: int = 0, rtol: float = 1e-9) -> int:
    """Pick the coefficient ``k`` in {1, 2} that reproduces the exact propagator.

    Every draw must agree for the winner; anything other than exactly one
    winner raises ``RuntimeError``.
    """
    rng = np.random.default_rng(seed)
    ok = {1: True, 2: True}
    for _ in range(n_draws):
        m, q10, q20, t = random_two_mode_draw(rng)
        exact = matrix_exponential_oracle(dynamics_matrix(m), [q10, 0, q20, 0], [t]).states[0]
        scale = np.linalg.norm(exact)
        for k in ok:
            q1, q2 = closed_form_two_mode(m, q10, q20, t, k)
            err = math.hypot(q1 - exact[0], q2 - exact[2])
            ok[k] = ok[k] and err <= rtol * scale
    winners = [k for k, good in ok.items() if good]
    if len(winners) != 1:
        raise RuntimeError(f"closed-form coefficient not unique: {winners}")
    return winners[0]


def random_two_mode_draw(rng):
    """Random two-mode model with unit carrier, initial displacements and time."""
    m = TwoModeModel(
        omega_b=1.0,
        gamma_1=rng.uniform(-0.2, 0.2),
        gamma_2=rng.uniform(-0.2, 0.2),
        j=rng.uniform(0.0, 0.3),
    )
    return m, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.0, 50.0)


# -- envelopes --------------------------------------------------------------


class GrowthClass(enum.Enum):
    EXPONENTIAL_DECAY = "ExponentialDecay"
    LINEAR_GROWTH = "LinearGrowth"
    EXPONENTIAL_GROWTH = "ExponentialGrowth"
    OSCILLATORY = "Oscillatory"


@dataclass(frozen=True)
class EnvelopeFit:
    """Envelope summary of one quadrature.

    ``rate`` is the e-folding rate magnitude for the exponential classes, the
    envelope slope for ``LinearGrowth`` and the signed log-slope otherwise.
    ``slope`` is always the least-squares slope of the envelope itself
    (amplitude per unit time) over the fitted window.
    """

    mode_label: str
    growth_class: GrowthClass
    rate: float
    peak_amplitude: float
    slope: float
    beat_period: Optional[float] = None


R2_MIN = 0.99
RATE_MIN = 1e-3
ACF_MIN = 0.9


def envelope_peaks(times: np.ndarray, y: np.ndarray):
    """Local maxima of ``|y|``, refined by a parabola through three samples."""
    a = np.abs(np.asarray(y))
    i = np.nonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]))[0] + 1
    ym, y0, yp = a[i - 1], a[i], a[i + 1]
    den = ym - 2 * y0 + yp
    with np.errstate(invalid="ignore", divide="ignore"):
        off = np.where(den != 0, 0.5 * (ym - yp) / den, 0.0)
    dt = times[i + 1] - times[i]
    return times[i] + off * dt, y0 - 0.25 * (ym - yp) * off


def _beat_period(tp, yp, spacing):
    """First autocorrelation maximum >= ACF_MIN after the envelope decorrelates."""
    grid = np.arange(tp[0], tp[-1], spacing)
    if len(grid) < 8:
        return None
    e = np.interp(grid, tp, yp)
    e = e - e.mean()
    n = len(e)
    # unbiased estimator: a periodic envelope returns to ~1 at each period
    full = np.correlate(e, e, "full")[n - 1 :]
    if full[0] <= 0:
        return None
    r = full / np.arange(n, 0, -1) / (full[0] / n)
    half = n // 2
    below = np.nonzero(r[:half] < 0)[0]
    if not len(below):
        return None
    for k in range(below[0] + 1, half - 1):
        if r[k] >= ACF_MIN and r[k] >= r[k - 1] and r[k] >= r[k + 1]:
            den = r[k - 1] - 2 * r[k] + r[k + 1]
            off = 0.5 * (r[k - 1] - r[k + 1]) / den if den != 0 else 0.0
            return (k + off) * spacing
    return None


def fit_envelope(tr: Trajectory, mode_label: str, omega_ref: float | None = None) -> EnvelopeFit:
    """Classify how the envelope of ``mode_label`` evolves.

    Peaks of ``|q|`` form the envelope. A periodic envelope (autocorrelation
    back above 0.9 after dropping below zero) is ``Oscillatory``. Otherwise
    exponential and linear models are fitted to the second half of the peaks,
    where start-up transients have died out. ``LinearGrowth`` needs the
    linear model to beat the exponential one in relative chi-square, a
    positive slope and an intercept no larger than half the final envelope;
    the exponential classes need R^2 >= 0.99 of the log-linear fit and
    ``|rate| >= 1e-3 * omega_ref``. Anything else is a steady ``Oscillatory``
    envelope without a beat period. ``omega_ref`` defaults to the carrier
    estimated from the peak spacing.
    """
    y = tr[mode_label]
    tp, yp = envelope_peaks(tr.times, y)
    keep = yp > 0
    tp, yp = tp[keep], yp[keep]
    if len(tp) < 5:
        raise TooShort(f"{mode_label}: {len(tp)} envelope peaks, need at least 5")
    spacing = float(np.median(np.diff(tp)))
    if omega_ref is None:
        omega_ref = math.pi / spacing
    peak = float(np.max(np.abs(y)))

    half = len(tp) // 2
    t_fit, y_fit = tp[half:], yp[half:]
    log_y = np.log(y_fit)
    log_slope, log_icpt = np.polyfit(t_fit, log_y, 1)
    resid = log_y - (log_slope * t_fit + log_icpt)
    ss_tot = np.sum((log_y - log_y.mean()) ** 2)
    r2 = 1 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    slope, icpt = np.polyfit(t_fit, y_fit, 1)
    chi_exp = np.sum(((y_fit - np.exp(log_slope * t_fit + log_icpt)) / y_fit) ** 2)
    chi_lin = np.sum(((y_fit - (slope * t_fit + icpt)) / y_fit) ** 2)

    beat = _beat_period(tp, yp, spacing)
    if beat is not None:
        return EnvelopeFit(mode_label, GrowthClass.OSCILLATORY, float(log_slope), peak, float(slope), float(beat))
    if chi_lin < chi_exp and slope > 0 and abs(icpt) <= 0.5 * y_fit[-1]:
        return EnvelopeFit(mode_label, GrowthClass.LINEAR_GROWTH, float(slope), peak, float(slope))
    if r2 >= R2_MIN and abs(log_slope) >= RATE_MIN * omega_ref:
        cls = GrowthClass.EXPONENTIAL_GROWTH if log_slope > 0 else GrowthClass.EXPONENTIAL_DECAY
        return EnvelopeFit(mode_label, cls, float(abs(log_slope)), peak, float(slope))
    return EnvelopeFit(mode_label, GrowthClass.OSCILLATORY, float(log_slope), peak, float(slope))
