"""Eigenvalue spectra, phase classification and exceptional-point location.

Eigenvalues are reported as ``lambda = frequency - 1j * linewidth`` so a
positive linewidth decays and a negative one grows.

The three-mode spectrum on the pseudo-Hermitian manifold solves the monic
cubic in ``x = Lambda - omega_2``::

    x**3 - 2*delta*x**2 - (2*J**2 - delta**2 - gamma_1**2)*x + 2*J**2*delta = 0

with Cardano's formulas written in the form

    a = 3*c1 - c2**2,  b = -(2*c2**3 - 9*c2*c1 + 27*c0),
    c = (b/2 + sqrt(a**3 + b**2/4)) ** (1/3),
    x1 = (-c2 - a/c + c) / 3, ...

which for the coefficients above reduces to ``a = -6J^2 - delta^2 + 3 gamma_1^2``
and ``b = -2 (9J^2 + 9 gamma_1^2 + delta^2) delta``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import AmbiguousPhase, NoSignChange, NotPseudoHermitian
from .model import (
    SymmetryClass,
    ThreeModeModel,
    TwoModeModel,
    check_pseudo_hermitian,
    replace_param,
)

EP_TOL = 1e-8
FREQ_TOL = 1e-8
# |c| below this (relative) makes the printed Cardano expressions singular
CARDANO_FALLBACK = 1e-14
# roots closer than this (relative) are left unpolished
CLUSTER_TOL = 1e-6

_SQRT3 = math.sqrt(3.0)


class ModelKind(enum.Enum):
    TWO_MODE = "TwoMode"
    THREE_MODE = "ThreeMode"


class PhaseLabel(enum.Enum):
    BROKEN = "Broken"
    AT_EP = "AtEP"
    UNBROKEN = "Unbroken"


@dataclass(frozen=True)
class ComplexEigenvalue:
    frequency: float
    linewidth: float
    branch: int

    @property
    def value(self) -> complex:
        return complex(self.frequency, -self.linewidth)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    model_kind: ModelKind

    def __post_init__(self):
        n = {ModelKind.TWO_MODE: 2, ModelKind.THREE_MODE: 3}[self.model_kind]
        if len(self.eigenvalues) != n:
            raise ValueError(f"{self.model_kind.value} spectrum needs {n} eigenvalues")
        branches = [e.branch for e in self.eigenvalues]
        if len(set(branches)) != n:
            raise ValueError("branch labels must be unique")

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.eigenvalues])

    @classmethod
    def from_values(cls, values, model_kind: ModelKind, branches=None) -> "Spectrum":
        """Order eigenvalues (descending real, then descending imaginary part)."""
        values = [complex(v) for v in values]
        if branches is None:
            branches = range(len(values))
        pairs = sorted(zip(values, branches), key=lambda vb: -vb[0].real)
        tie = 1e-12 * max(1.0, max(abs(v) for v in values))
        # insertion pass: near-equal real parts fall back to the imaginary part
        for _ in range(len(pairs)):
            for i in range(len(pairs) - 1):
                u, v = pairs[i][0], pairs[i + 1][0]
                if abs(u.real - v.real) <= tie and v.imag > u.imag:
                    pairs[i], pairs[i + 1] = pairs[i + 1], pairs[i]
        eigs = tuple(ComplexEigenvalue(v.real, -v.imag, int(b)) for v, b in pairs)
        return cls(eigs, model_kind)


@dataclass(frozen=True)
class PhaseReport:
    symmetry: SymmetryClass
    label: PhaseLabel
    ep_order: int
    coalescence: float


# -- two-mode ---------------------------------------------------------------


def eig2_closed_form(m: TwoModeModel) -> Spectrum:
    """``omega_b +/- Omega - i*gamma_plus`` with ``Omega = sqrt(J^2 - gamma_minus^2)``.

    ``Omega`` is the principal complex root, so in the broken phase it is
    ``+i|Omega|`` and branch ``+1`` carries the larger imaginary part.
    """
    omega = np.sqrt(complex(m.j**2 - m.gamma_minus**2, 0.0))
    centre = complex(m.omega_b, -m.gamma_plus)
    return Spectrum.from_values([centre + omega, centre - omega], ModelKind.TWO_MODE, branches=(1, -1))


def eig2_numeric(m: TwoModeModel) -> np.ndarray:
    return np.linalg.eigvals(m.hamiltonian())


# -- cubic machinery ----------------------------------------------------------


def cubic_coefficients(m: ThreeModeModel, tol: float = 1e-9) -> tuple[float, float, float]:
    """Monic cubic coefficients ``(c2, c1, c0)`` in ``x = Lambda - omega_2``."""
    report = check_pseudo_hermitian(m, tol)
    if not report.satisfied:
        raise NotPseudoHermitian(f"pseudo-Hermitian residuals {report.residuals} exceed {tol}")
    d, g, j = m.delta, m.gamma_1, m.j
    return -2.0 * d, -(2.0 * j * j - d * d - g * g), 2.0 * j * j * d


def cubic_discriminant(c2, c1, c0):
    """Discriminant of ``x^3 + c2 x^2 + c1 x + c0``; zero iff a root repeats."""
    return 18 * c2 * c1 * c0 - 4 * c2**3 * c0 + c2**2 * c1**2 - 4 * c1**3 - 27 * c0**2


def companion_roots(c2, c1, c0) -> np.ndarray:
    companion = np.array([[-c2, -c1, -c0], [1, 0, 0], [0, 1, 0]], dtype=complex)
    return np.linalg.eigvals(companion)


def _coefficient_scale(c2, c1, c0) -> float:
    return max(abs(c2), math.sqrt(abs(c1)), abs(c0) ** (1.0 / 3.0))


def _newton_polish(roots, c2, c1, c0, iters=3):
    roots = np.array(roots, dtype=complex)
    cluster = CLUSTER_TOL * max(_coefficient_scale(c2, c1, c0), np.max(np.abs(roots)))
    for k in range(len(roots)):
        x = roots[k]
        others = np.delete(roots, k)
        gap = np.min(np.abs(others - x)) if len(others) else np.inf
        # one-sided steps inside a root cluster break the symmetry of the pair
        if gap <= cluster:
            continue
        for _ in range(iters):
            p = ((x + c2) * x + c1) * x + c0
            dp = (3 * x + 2 * c2) * x + c1
            if p == 0 or dp == 0:
                break
            step = p / dp
            xn = x - step
            pn = ((xn + c2) * xn + c1) * xn + c0
            # a step that jumps towards a neighbouring root is rejected
            if abs(pn) >= abs(p) or abs(step) > 0.5 * gap:
                break
            x = xn
        roots[k] = x
    return roots


def _cardano(c2, c1, c0) -> np.ndarray:
    a = 3 * c1 - c2 * c2
    b = -(2 * c2**3 - 9 * c2 * c1 + 27 * c0)
    root = np.sqrt(complex(a**3 + b * b / 4))
    u_plus, u_minus = b / 2 + root, b / 2 - root
    u = u_plus if abs(u_plus) >= abs(u_minus) else u_minus
    c = complex(u) ** (1.0 / 3.0)
    scale = _coefficient_scale(c2, c1, c0)
    if scale == 0 or abs(c) < CARDANO_FALLBACK * scale:
        return companion_roots(c2, c1, c0)
    x1 = (-c2 - a / c + c) / 3
    x2 = (-c2 + (1 + 1j * _SQRT3) / (2 * c) * a - (1 - 1j * _SQRT3) / 2 * c) / 3
    x3 = (-c2 + (1 - 1j * _SQRT3) / (2 * c) * a - (1 + 1j * _SQRT3) / 2 * c) / 3
    return np.array([x1, x2, x3], dtype=complex)


def cubic_roots_closed_form(c2, c1, c0) -> np.ndarray:
    """Roots ``(x1, x2, x3)`` of the monic cubic from Cardano's formulas.

    The sign of the inner square root is chosen to maximize ``|c|``; when
    ``|c|`` is negligible (triple-root vicinity) the companion matrix is used
    instead. Roots are Newton-polished.
    """
    return _newton_polish(_cardano(c2, c1, c0), c2, c1, c0)


def _char_poly_shifted(h: np.ndarray):
    """Characteristic cubic of ``h - s I`` with ``s = trace(h)/3``."""
    s = np.trace(h) / 3
    bm = h - s * np.eye(3)
    c2 = -np.trace(bm)
    c1 = (
        bm[0, 0] * bm[1, 1] - bm[0, 1] * bm[1, 0]
        + bm[0, 0] * bm[2, 2] - bm[0, 2] * bm[2, 0]
        + bm[1, 1] * bm[2, 2] - bm[1, 2] * bm[2, 1]
    )
    c0 = -np.linalg.det(bm)
    return s, c2, c1, c0


def eig3(m: ThreeModeModel) -> Spectrum:
    """Eigenvalues of the 3x3 magnomechanical matrix via its characteristic cubic."""
    s, c2, c1, c0 = _char_poly_shifted(m.hamiltonian())
    roots = cubic_roots_closed_form(c2, c1, c0) + s
    return Spectrum.from_values(roots, ModelKind.THREE_MODE)


def spectrum(model: Union[TwoModeModel, ThreeModeModel]) -> Spectrum:
    if isinstance(model, TwoModeModel):
        return eig2_closed_form(model)
    if isinstance(model, ThreeModeModel):
        return eig3(model)
    raise TypeError(f"no spectrum for {type(model).__name__}")


def geometric_multiplicity(h: np.ndarray, eigenvalue: complex, rtol: float = 1e-6) -> int:
    """``n - rank(h - eigenvalue*I)`` with an SVD rank cutoff relative to ``||h||``."""
    sv = np.linalg.svd(h - eigenvalue * np.eye(h.shape[0]), compute_uv=False)
    cutoff = rtol * max(np.linalg.norm(h, 2), np.finfo(float).tiny)
    return int(np.sum(sv <= cutoff))


# -- phases -----------------------------------------------------------------


def _frequency_scale(values: np.ndarray) -> float:
    ref = np.max(np.abs(values.real))
    if ref == 0:
        ref = np.max(np.abs(values))
    return ref if ref > 0 else 1.0


def _clusters(values, tol):
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if abs(values[i] - values[k]) <= tol:
                parent[find(i)] = find(k)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def coalescence(values) -> float:
    values = np.asarray(values)
    return min(abs(values[i] - values[k]) for i in range(len(values)) for k in range(i + 1, len(values)))


def classify_phase(
    s: Spectrum,
    sym: SymmetryClass,
    ep_tol: float | None = None,
    freq_tol: float | None = None,
) -> PhaseReport:
    """Label a spectrum Broken, AtEP or Unbroken.

    Tolerances default to ``1e-8`` times the carrier frequency (largest
    ``|Re lambda|``). Broken: two or more eigenvalues share a frequency but
    not a linewidth. Unbroken: every linewidth agrees and every frequency is
    distinct. ``ep_order`` is the size of the coalescing cluster at an EP and
    0 elsewhere. A common decay shift, as in the dissipative class, cancels
    in both comparisons.
    """
    values = s.values
    ref = _frequency_scale(values)
    ep_tol = EP_TOL * ref if ep_tol is None else ep_tol
    freq_tol = FREQ_TOL * ref if freq_tol is None else freq_tol
    gap = coalescence(values)
    if gap <= ep_tol:
        order = max(len(c) for c in _clusters(values, ep_tol))
        return PhaseReport(sym, PhaseLabel.AT_EP, order, gap)
    n = len(values)
    pairs = [(i, k) for i in range(n) for k in range(i + 1, n)]
    same_freq = [abs(values[i].real - values[k].real) <= freq_tol for i, k in pairs]
    same_width = [abs(values[i].imag - values[k].imag) <= freq_tol for i, k in pairs]
    if any(f and not w for f, w in zip(same_freq, same_width)):
        return PhaseReport(sym, PhaseLabel.BROKEN, 0, gap)
    if all(same_width) and not any(same_freq):
        return PhaseReport(sym, PhaseLabel.UNBROKEN, 0, gap)
    raise AmbiguousPhase(f"spectrum {values} fits neither the broken nor the unbroken pattern")


# -- exceptional points -----------------------------------------------------


def model_scale(model) -> float:
    if isinstance(model, TwoModeModel):
        return max(abs(model.gamma_1), abs(model.gamma_2), abs(model.j))
    return max(abs(model.gamma_1), abs(model.j), abs(model.delta))


def ep_indicator(model) -> float:
    """Real function vanishing at eigenvalue coalescence.

    ``J^2 - gamma_minus^2`` for two modes, the cubic discriminant for a
    pseudo-Hermitian three-mode model.
    """
    if isinstance(model, TwoModeModel):
        return model.j**2 - model.gamma_minus**2
    return float(cubic_discriminant(*cubic_coefficients(model)))


def ep_order_at(model) -> int:
    if isinstance(model, TwoModeModel):
        return 2
    c2, c1, c0 = cubic_coefficients(model)
    scale = max(model_scale(model), np.finfo(float).tiny)
    p = c1 - c2 * c2 / 3
    q = 2 * c2**3 / 27 - c2 * c1 / 3 + c0
    return 3 if abs(p) <= 1e-6 * scale**2 and abs(q) <= 1e-6 * scale**3 else 2


def locate_ep(model, sweep_param: str = "j", bracket=(0.0, 1.0), rtol: float = 1e-12):
    """Root of :func:`ep_indicator` along ``sweep_param`` inside ``bracket``.

    Returns ``(param_value, ep_order)``. A bracket without an end-point sign
    change is scanned on a grid; an indicator that only touches zero is
    accepted when the spectrum there coalesces within the EP tolerance.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must be increasing")

    def at(v):
        return replace_param(model, sweep_param, v)

    def f(v):
        return ep_indicator(at(v))

    xtol = 1e-13 * max(abs(lo), abs(hi))
    f_lo, f_hi = f(lo), f(hi)
    root = None
    if f_lo == 0:
        root = lo
    elif f_hi == 0:
        root = hi
    elif np.sign(f_lo) != np.sign(f_hi):
        root = brentq(f, lo, hi, xtol=xtol, rtol=rtol, maxiter=1000)
    else:
        grid = np.linspace(lo, hi, 401)
        vals = np.array([f(v) for v in grid])
        change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
        if len(change):
            i = change[0]
            root = grid[i] if vals[i] == 0 else brentq(f, grid[i], grid[i + 1], xtol=xtol, rtol=rtol, maxiter=1000)
        else:
            i = int(np.argmin(np.abs(vals)))
            a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
            res = minimize_scalar(lambda v: abs(f(v)), bounds=(a, b), method="bounded",
                                  options={"xatol": xtol})
            candidate = float(res.x)
            values = spectrum(at(candidate)).values
            if coalescence(values) > EP_TOL * _frequency_scale(values):
                raise NoSignChange(
                    f"EP indicator keeps one sign on [{lo}, {hi}] along {sweep_param!r}"
                )
            root = candidate
    return float(root), ep_order_at(at(root))
