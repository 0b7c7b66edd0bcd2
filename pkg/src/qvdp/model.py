"""Quintic van der Pol-Duffing oscillator: vector fields and pointwise quantities.

The family under study is the planar system

    x' = y
    y' = (mu + x^2 - x^4) y + beta x - eps x^3 - alpha x cos(omega t)

with real parameters (mu, beta, eps, alpha, omega), beta >= 0.  The unforced
system (alpha = 0) is Z2-equivariant: orbits come in (x, y) <-> (-x, -y)
pairs.  An equivalent Lienard form and the Hamiltonian of the eps1 = 0
scaling limit are provided alongside the raw fields.

All functions here are pure and operate on 64-bit floats; parameter
validation happens once, at :class:`Params` construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "Params",
    "State",
    "LienardForms",
    "field_unforced",
    "field_forced",
    "field_lienard",
    "jacobian",
    "divergence",
    "hamiltonian",
    "unforced_rhs",
    "forced_rhs_3d",
    "lienard_rhs",
    "hamiltonian_rhs",
]


class State(NamedTuple):
    """Point of the planar phase space (position x, velocity y)."""

    x: float
    y: float


@dataclass(frozen=True)
class Params:
    """Parameter vector (mu, beta, eps, alpha, omega) of the oscillator.

    Constraints enforced on construction:

    * ``beta >= 0``
    * ``beta`` and ``eps`` not both zero (otherwise the whole line y = 0
      consists of equilibria and the analysis degenerates)
    * ``omega > 0`` whenever the forcing amplitude ``alpha`` is nonzero
    * all entries finite
    """

    mu: float
    beta: float
    eps: float
    alpha: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        vals = (self.mu, self.beta, self.eps, self.alpha, self.omega)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("all parameters must be finite")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.beta == 0 and self.eps == 0:
            raise ValueError("beta and eps must not both be zero")
        if self.alpha != 0 and not self.omega > 0:
            raise ValueError("omega must be > 0 when alpha != 0")

    @property
    def forcing_period(self) -> float:
        """Period 2*pi/omega of the external forcing."""
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class LienardForms:
    """Odd polynomials F, g of the equivalent Lienard form.

    The unforced system is orbit-equivalent to

        x' = y - F(x),   y' = -g(x)

    with F(x) = -mu x - x^3/3 + x^5/5 and g(x) = -beta x + eps x^3.
    Coefficients are stored for the odd powers (x, x^3, x^5) and
    (x, x^3) respectively.
    """

    F_coeffs: tuple[float, float, float]
    g_coeffs: tuple[float, float]

    @classmethod
    def from_params(cls, p: Params) -> "LienardForms":
        return cls(F_coeffs=(-p.mu, -1.0 / 3.0, 1.0 / 5.0),
                   g_coeffs=(-p.beta, p.eps))

    def F(self, x: float) -> float:
        c1, c3, c5 = self.F_coeffs
        x2 = x * x
        return x * (c1 + x2 * (c3 + x2 * c5))

    def g(self, x: float) -> float:
        d1, d3 = self.g_coeffs
        return x * (d1 + x * x * d3)


def field_unforced(s: State, p: Params) -> State:
    """Vector field of the autonomous (alpha = 0) system at state ``s``."""
    x, y = s
    x2 = x * x
    return State(y, (p.mu + x2 - x2 * x2) * y + p.beta * x - p.eps * x2 * x)


def field_forced(s: State, t: float, p: Params) -> State:
    """Vector field of the forced system at state ``s`` and time ``t``.

    Reduces exactly to :func:`field_unforced` when ``alpha == 0``.
    """
    x, y = s
    dx, dy = field_unforced(s, p)
    return State(dx, dy - p.alpha * x * math.cos(p.omega * t))


def field_lienard(s: State, p: Params) -> State:
    """Vector field of the Z2-equivariant Lienard form at state ``s``.

    Solutions map onto solutions of the unforced field under
    (x, y) -> (x, y + F(x)).
    """
    forms = LienardForms.from_params(p)
    x, y = s
    return State(y - forms.F(x), -forms.g(x))


def jacobian(s: State, p: Params) -> np.ndarray:
    """Jacobian matrix of the unforced field at state ``s`` (2x2 array)."""
    x, y = s
    x2 = x * x
    return np.array([
        [0.0, 1.0],
        [p.beta - 3.0 * p.eps * x2 + (2.0 * x - 4.0 * x2 * x) * y,
         p.mu + x2 - x2 * x2],
    ])


def divergence(x: float, p: Params) -> float:
    """Divergence mu + x^2 - x^4 of the unforced field.

    Independent of y; its maximum over x is mu + 1/4, attained at
    x^2 = 1/2.  Nonpositive divergence everywhere (mu <= -1/4) rules out
    closed orbits by the Bendixson-Dulac criterion.
    """
    x2 = x * x
    return p.mu + x2 - x2 * x2


def hamiltonian(s: State, p: Params) -> float:
    """Energy H = y^2/2 - beta x^2/2 + eps x^4/4 of the scaling limit.

    H is a first integral of x' = y, y' = beta x - eps x^3 (the system with
    the velocity-dependent terms switched off).  Its zero level set, for
    beta > 0 and eps > 0, carries the pair of explicit homoclinic orbits
    x(t) = +/- sqrt(2 beta/eps) sech t.
    """
    x, y = s
    x2 = x * x
    return 0.5 * y * y - 0.5 * p.beta * x2 + 0.25 * p.eps * x2 * x2


# --- RHS factories for the integrator (array in, array out) ---

def unforced_rhs(p: Params) -> Callable[[float, np.ndarray], np.ndarray]:
    """Closure f(t, [x, y]) -> [x', y'] for the autonomous system."""
    mu, beta, eps = p.mu, p.beta, p.eps

    def rhs(t, s):
        x, y = s
        x2 = x * x
        return np.array([y, (mu + x2 - x2 * x2) * y + beta * x - eps * x2 * x])

    return rhs


def forced_rhs_3d(p: Params) -> Callable[[float, np.ndarray], np.ndarray]:
    """Closure for the forced system as a 3D autonomous extension.

    State is [x, y, theta] with theta = omega*t the forcing phase; the
    returned field is time-independent, which keeps section/event machinery
    uniform across the forced and unforced cases.
    """
    mu, beta, eps, alpha, omega = p.mu, p.beta, p.eps, p.alpha, p.omega

    def rhs(t, s):
        x, y, theta = s
        x2 = x * x
        dy = (mu + x2 - x2 * x2) * y + beta * x - eps * x2 * x \
            - alpha * x * math.cos(theta)
        return np.array([y, dy, omega])

    return rhs


def lienard_rhs(p: Params) -> Callable[[float, np.ndarray], np.ndarray]:
    """Closure f(t, [x, y]) for the Lienard form."""
    forms = LienardForms.from_params(p)

    def rhs(t, s):
        x, y = s
        return np.array([y - forms.F(x), -forms.g(x)])

    return rhs


def hamiltonian_rhs(p: Params) -> Callable[[float, np.ndarray], np.ndarray]:
    """Closure f(t, [x, y]) for the conservative limit x' = y, y' = beta x - eps x^3."""
    beta, eps = p.beta, p.eps

    def rhs(t, s):
        x, y = s
        return np.array([y, beta * x - eps * x * x * x])

    return rhs
