"""Parameter models for the linearized magno-optomechanical system.

The full system has four bosonic modes: the optical cavity ``a``, the Kittel
mode ``m`` and two mechanical modes ``b1``, ``b2``. Eliminating the cavity
leaves a three-mode magnomechanical model; eliminating both the cavity and
the Kittel mode leaves two coupled mechanical oscillators with effective
decay rates ``G**2 / kappa``.

All frequencies and rates are angular (rad/s). Gain is a negative decay rate.
"""
from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import AdiabaticValidityWarning, NondegenerateModes, ZeroDenominator

TOL_DEGENERACY = 1e-9
RATIO_MIN = 10.0
FLOOR_SCALE = 1e-12


def _check_finite(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite, got {value!r}")


def _check_nonneg(obj, names):
    for name in names:
        if getattr(obj, name) < 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be >= 0")


def _coerce_floats(obj):
    for f in dataclasses.fields(obj):
        object.__setattr__(obj, f.name, float(getattr(obj, f.name)))


@dataclass(frozen=True)
class PhysicalParams:
    """Linearized four-mode system: cavity, Kittel mode, two mechanical modes."""

    delta_a: float
    delta_m: float
    kappa_a: float
    kappa_m: float
    g_a_lin: float
    g_m_lin: float
    omega_1: float
    omega_2: float
    j: float

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self, [f.name for f in dataclasses.fields(self)])
        _check_nonneg(self, ("g_a_lin", "g_m_lin", "j"))

    def hamiltonian(self) -> np.ndarray:
        """Mode-space matrix in the order (a, m, b1, b2)."""
        return np.array(
            [
                [self.delta_a - 1j * self.kappa_a, 0, self.g_a_lin, 0],
                [0, self.delta_m - 1j * self.kappa_m, 0, self.g_m_lin],
                [self.g_a_lin, 0, self.omega_1, self.j],
                [0, self.g_m_lin, self.j, self.omega_2],
            ],
            dtype=complex,
        )


@dataclass(frozen=True)
class TwoModeModel:
    """Two coupled mechanical modes at a common frequency ``omega_b``."""

    omega_b: float
    gamma_1: float
    gamma_2: float
    j: float

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self, ("omega_b", "gamma_1", "gamma_2", "j"))
        _check_nonneg(self, ("j",))

    @property
    def gamma_plus(self) -> float:
        return (self.gamma_1 + self.gamma_2) / 2

    @property
    def gamma_minus(self) -> float:
        return (self.gamma_1 - self.gamma_2) / 2

    def hamiltonian(self) -> np.ndarray:
        """Effective 2x2 matrix in the order (b1, b2)."""
        return np.array(
            [
                [self.omega_b - 1j * self.gamma_1, self.j],
                [self.j, self.omega_b - 1j * self.gamma_2],
            ],
            dtype=complex,
        )


@dataclass(frozen=True)
class ThreeModeModel:
    """Kittel mode coupled to mechanical mode ``b2``, which couples to ``b1``.

    ``gamma_1`` is the effective rate left on ``b1`` by eliminating the cavity.
    """

    delta_m: float
    kappa_m: float
    g_m_lin: float
    omega_1: float
    gamma_1: float
    omega_2: float
    j: float

    def __post_init__(self):
        _coerce_floats(self)
        _check_finite(self, [f.name for f in dataclasses.fields(self)])
        _check_nonneg(self, ("g_m_lin", "j"))

    @property
    def delta(self) -> float:
        return self.omega_1 - self.omega_2

    @classmethod
    def pseudo_hermitian(cls, omega_2: float, delta: float, gamma_1: float, j: float) -> "ThreeModeModel":
        """Build the model on the pseudo-Hermitian manifold.

        Sets ``kappa_m = -gamma_1`` (balanced gain), ``delta_m = omega_1``
        (red sideband of ``b1``) and ``g_m_lin = j`` (uniform couplings).
        """
        omega_1 = omega_2 + delta
        return cls(
            delta_m=omega_1,
            kappa_m=-gamma_1,
            g_m_lin=j,
            omega_1=omega_1,
            gamma_1=gamma_1,
            omega_2=omega_2,
            j=j,
        )

    def hamiltonian(self) -> np.ndarray:
        """Mode-space matrix in the order (m, b1, b2)."""
        return np.array(
            [
                [self.delta_m - 1j * self.kappa_m, 0, self.g_m_lin],
                [0, self.omega_1 - 1j * self.gamma_1, self.j],
                [self.g_m_lin, self.j, self.omega_2],
            ],
            dtype=complex,
        )


Model = Union[TwoModeModel, ThreeModeModel, PhysicalParams]


class SymmetryClass(enum.Enum):
    PT_SYMMETRIC = "PTSymmetric"
    PURELY_DISSIPATIVE = "PurelyDissipative"
    PSEUDO_HERMITIAN = "PseudoHermitian"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class DynamicsMatrix:
    """Real generator ``A`` of ``dx/dt = A x`` on interleaved quadratures."""

    entries: np.ndarray
    labels: tuple

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        labels = tuple(self.labels)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (4, 6, 8):
            raise ValueError(f"dynamics matrix must be 4x4, 6x6 or 8x8, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("dynamics matrix entries must be finite")
        if len(labels) != a.shape[0]:
            raise ValueError("need one label per quadrature")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "labels", labels)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def index(self, label: str) -> int:
        return self.labels.index(label)


def _warn_adiabatic(kappa, g, name):
    if abs(kappa) < RATIO_MIN * g:
        warnings.warn(
            f"|{name}| = {abs(kappa):.3g} is below {RATIO_MIN:g} x coupling {g:.3g}; "
            "adiabatic elimination may be inaccurate",
            AdiabaticValidityWarning,
            stacklevel=3,
        )


def effective_rates(p: PhysicalParams) -> tuple[float, float]:
    """Return ``(G_a**2/kappa_a, G_m**2/kappa_m)``."""
    if p.kappa_a == 0 or p.kappa_m == 0:
        raise ZeroDenominator("effective rates need nonzero kappa_a and kappa_m")
    return p.g_a_lin**2 / p.kappa_a, p.g_m_lin**2 / p.kappa_m


def reduce_to_two_mode(p: PhysicalParams, tol_degeneracy: float = TOL_DEGENERACY) -> TwoModeModel:
    """Eliminate the cavity and the Kittel mode."""
    if abs(p.omega_1 - p.omega_2) > tol_degeneracy * max(abs(p.omega_1), abs(p.omega_2)):
        raise NondegenerateModes(
            f"two-mode reduction needs omega_1 == omega_2, got {p.omega_1!r} and {p.omega_2!r}"
        )
    gamma_1, gamma_2 = effective_rates(p)
    _warn_adiabatic(p.kappa_a, p.g_a_lin, "kappa_a")
    _warn_adiabatic(p.kappa_m, p.g_m_lin, "kappa_m")
    return TwoModeModel(omega_b=p.omega_1, gamma_1=gamma_1, gamma_2=gamma_2, j=p.j)


def reduce_to_three_mode(p: PhysicalParams) -> ThreeModeModel:
    """Eliminate only the cavity."""
    if p.kappa_a == 0:
        raise ZeroDenominator("three-mode reduction needs nonzero kappa_a")
    _warn_adiabatic(p.kappa_a, p.g_a_lin, "kappa_a")
    return ThreeModeModel(
        delta_m=p.delta_m,
        kappa_m=p.kappa_m,
        g_m_lin=p.g_m_lin,
        omega_1=p.omega_1,
        gamma_1=p.g_a_lin**2 / p.kappa_a,
        omega_2=p.omega_2,
        j=p.j,
    )


class PseudoHermitianReport(NamedTuple):
    satisfied: bool
    residuals: tuple[float, float, float]


def check_pseudo_hermitian(
    m: ThreeModeModel, tol: float = 1e-9, floor_scale: float | None = None
) -> PseudoHermitianReport:
    """Test ``gamma_1 == -kappa_m``, ``delta_m == omega_1`` and ``g_m == j``.

    Residuals are normalized by ``max(|gamma_1|, floor_scale)``; the default
    floor is ``1e-12 * omega_2`` (the mechanical carrier).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if floor_scale is None:
        floor_scale = FLOOR_SCALE * max(abs(m.omega_2), abs(m.omega_1), np.finfo(float).tiny)
    scale = max(abs(m.gamma_1), floor_scale)
    residuals = (
        abs(m.gamma_1 + m.kappa_m) / scale,
        abs(m.delta_m - m.omega_1) / scale,
        abs(m.g_m_lin - m.j) / scale,
    )
    return PseudoHermitianReport(all(r <= tol for r in residuals), residuals)


def symmetry_class(model: TwoModeModel | ThreeModeModel, tol: float = 1e-9) -> SymmetryClass:
    """Symmetry class of an effective model, by its defining parameter relation."""
    if isinstance(model, TwoModeModel):
        scale = max(abs(model.gamma_1), abs(model.gamma_2))
        if scale > 0 and abs(model.gamma_plus) <= tol * scale:
            return SymmetryClass.PT_SYMMETRIC
        if model.gamma_1 > 0 and model.gamma_2 > 0:
            return SymmetryClass.PURELY_DISSIPATIVE
        return SymmetryClass.UNCLASSIFIED
    if isinstance(model, ThreeModeModel):
        if check_pseudo_hermitian(model, tol).satisfied:
            return SymmetryClass.PSEUDO_HERMITIAN
        return SymmetryClass.UNCLASSIFIED
    raise TypeError(f"no symmetry class for {type(model).__name__}")


def replace_param(model, name: str, value: float, keep_pseudo_hermitian: bool = True):
    """Copy ``model`` with one field changed.

    For a pseudo-Hermitian ``ThreeModeModel`` the partner field of the
    condition moves with it (``j`` drags ``g_m_lin``, ``gamma_1`` drags
    ``kappa_m``, ``omega_1`` drags ``delta_m``) so a sweep stays on the
    manifold.
    """
    if name == "delta" and isinstance(model, ThreeModeModel):
        name, value = "omega_1", model.omega_2 + value
    if name not in {f.name for f in dataclasses.fields(model)}:
        raise ValueError(f"{type(model).__name__} has no parameter {name!r}")
    changes = {name: value}
    if (
        keep_pseudo_hermitian
        and isinstance(model, ThreeModeModel)
        and check_pseudo_hermitian(model).satisfied
    ):
        partner = {
            "j": ("g_m_lin", 1.0),
            "g_m_lin": ("j", 1.0),
            "gamma_1": ("kappa_m", -1.0),
            "kappa_m": ("gamma_1", -1.0),
            "omega_1": ("delta_m", 1.0),
            "delta_m": ("omega_1", 1.0),
        }.get(name)
        if partner is not None:
            changes[partner[0]] = partner[1] * value
    return dataclasses.replace(model, **changes)


# mode orderings of each model's hamiltonian(), and the quadrature order used
# by the dynamics matrix (mechanical modes first)
_MODE_NAMES = {
    TwoModeModel: ("1", "2"),
    ThreeModeModel: ("m", "1", "2"),
    PhysicalParams: ("a", "m", "1", "2"),
}
_QUADRATURE_MODES = {
    TwoModeModel: ("1", "2"),
    ThreeModeModel: ("1", "2", "m"),
    PhysicalParams: ("1", "2", "m", "a"),
}


def quadrature_labels(model: Model) -> tuple[str, ...]:
    labels = []
    for mode in _QUADRATURE_MODES[type(model)]:
        labels += [f"q{mode}", f"p{mode}"]
    return tuple(labels)


def dynamics_matrix(model: Model) -> DynamicsMatrix:
    """Real quadrature generator for ``b = (q + i p)/sqrt(2)``.

    The complex mode equations are ``db/dt = -i H b``. Writing
    ``M = -i H``, each mode pair contributes
    ``dq/dt = Re(M) q - Im(M) p`` and ``dp/dt = Im(M) q + Re(M) p``.
    """
    cls = type(model)
    if cls not in _MODE_NAMES:
        raise TypeError(f"no dynamics for {cls.__name__}")
    h = model.hamiltonian()
    order = [_MODE_NAMES[cls].index(mode) for mode in _QUADRATURE_MODES[cls]]
    mm = -1j * h[np.ix_(order, order)]
    n = len(order)
    a = np.zeros((2 * n, 2 * n))
    a[0::2, 0::2] = mm.real
    a[0::2, 1::2] = -mm.imag
    a[1::2, 0::2] = mm.imag
    a[1::2, 1::2] = mm.real
    # -0.0 entries would otherwise leak into exported matrices
    a += 0.0
    return DynamicsMatrix(a, quadrature_labels(model))
