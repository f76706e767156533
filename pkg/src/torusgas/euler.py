"""Coefficient matrices and spectral right-hand side of the gas system.

The unknown is U = (rho, u, v, h) where rho is the density, (u, v) the
velocity, and h = p/rho the pressure to density ratio.  The evolution
system in classical (non-conservation) form is

    rho_t + u rho_x + v rho_y + rho (u_x + v_y)      = 0
    u_t   + u u_x   + v u_y   + h_x + (h/rho) rho_x  = 0
    v_t   + u v_x   + v v_y   + h_y + (h/rho) rho_y  = 0
    h_t   + u h_x   + v h_y   + (gamma - 1) h (u_x + v_y) = 0,

equivalently U_t + A(U) U_x + B(U) U_y = 0.  The admissible region is
rho > 0 and h > 0; there the system is symmetrizable: the diagonal
positive-definite matrix A0 turns A and B into the symmetric products
A1 = A0 A and B1 = A0 B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .spectral import Field, TorusGrid

__all__ = [
    "GasParams",
    "PointState",
    "StateGradients",
    "State",
    "AdmissibleStateError",
    "CoeffMatrix",
    "matrix_A",
    "matrix_B",
    "matrix_A0",
    "matrix_A1",
    "matrix_B1",
    "matrix_C",
    "symmetrizer_floor",
    "rhs",
    "divergence",
    "max_wave_speed",
    "state_norm",
    "state_difference",
    "base_deviation",
]

#: 4x4 real coefficient matrix; plain ndarray with finite entries.
CoeffMatrix = np.ndarray

#: Default positivity floor for admissible-region checks.
REGION_FLOOR = 1e-8


class AdmissibleStateError(ValueError):
    """A state left the region rho > 0, h > 0 where the system is hyperbolic."""


@dataclass(frozen=True)
class GasParams:
    """Gas constants: adiabatic exponent and the base state (rho0, 0, 0, h0)."""

    gamma: float = 1.4
    rho0: float = 1.0
    h0: float = 1.0

    def __post_init__(self) -> None:
        if not 1.0 < self.gamma < 3.0:
            raise ValueError(f"gamma must lie in (1, 3), got {self.gamma}")
        if self.rho0 <= 0.0 or self.h0 <= 0.0:
            raise ValueError("base state requires rho0 > 0 and h0 > 0")


@dataclass(frozen=True)
class PointState:
    """A single admissible state vector (rho, u, v, h)."""

    rho: float
    u: float
    v: float
    h: float

    def __post_init__(self) -> None:
        if not (self.rho > 0.0 and self.h > 0.0):
            raise AdmissibleStateError(
                f"point state needs rho > 0 and h > 0, got rho={self.rho}, h={self.h}"
            )


@dataclass(frozen=True)
class StateGradients:
    """First spatial derivatives of (rho, u, v, h) at one point."""

    rho_x: float = 0.0
    rho_y: float = 0.0
    u_x: float = 0.0
    u_y: float = 0.0
    v_x: float = 0.0
    v_y: float = 0.0
    h_x: float = 0.0
    h_y: float = 0.0


def _finite(m: np.ndarray) -> CoeffMatrix:
    if not np.all(np.isfinite(m)):
        raise ValueError("coefficient matrix has non-finite entries")
    return m


def matrix_A(p: PointState, g: GasParams) -> CoeffMatrix:
    """Coefficient of U_x in the classical-form system."""
    return _finite(
        np.array(
            [
                [p.u, p.rho, 0.0, 0.0],
                [p.h / p.rho, p.u, 0.0, 1.0],
                [0.0, 0.0, p.u, 0.0],
                [0.0, (g.gamma - 1.0) * p.h, 0.0, p.u],
            ]
        )
    )


def matrix_B(p: PointState, g: GasParams) -> CoeffMatrix:
    """Coefficient of U_y in the classical-form system."""
    return _finite(
        np.array(
            [
                [p.v, 0.0, p.rho, 0.0],
                [0.0, p.v, 0.0, 0.0],
                [p.h / p.rho, 0.0, p.v, 1.0],
                [0.0, 0.0, (g.gamma - 1.0) * p.h, p.v],
            ]
        )
    )


def matrix_A0(p: PointState, g: GasParams) -> CoeffMatrix:
    """Diagonal symmetrizer diag(h/rho, rho, rho, rho/((gamma-1) h))."""
    return _finite(
        np.diag(
            [
                p.h / p.rho,
                p.rho,
                p.rho,
                p.rho / ((g.gamma - 1.0) * p.h),
            ]
        )
    )


def matrix_A1(p: PointState, g: GasParams) -> CoeffMatrix:
    """Symmetric product A0 A, written out entrywise."""
    return _finite(
        np.array(
            [
                [p.u * p.h / p.rho, p.h, 0.0, 0.0],
                [p.h, p.rho * p.u, 0.0, p.rho],
                [0.0, 0.0, p.rho * p.u, 0.0],
                [0.0, p.rho, 0.0, p.rho * p.u / ((g.gamma - 1.0) * p.h)],
            ]
        )
    )


def matrix_B1(p: PointState, g: GasParams) -> CoeffMatrix:
    """Symmetric product A0 B, written out entrywise."""
    return _finite(
        np.array(
            [
                [p.v * p.h / p.rho, 0.0, p.h, 0.0],
                [0.0, p.rho * p.v, 0.0, 0.0],
                [p.h, 0.0, p.rho * p.v, p.rho],
                [0.0, 0.0, p.rho, p.rho * p.v / ((g.gamma - 1.0) * p.h)],
            ]
        )
    )


def matrix_C(
    p: PointState,
    grads: StateGradients,
    h_approx: float,
    g: GasParams,
) -> CoeffMatrix:
    """Zeroth-order coefficient matrix of the error evolution system.

    Every entry carries one spatial derivative of the reference state, so
    the matrix vanishes wherever the reference state is constant.

    Parameters
    ----------
    p : PointState
        The state at which the matrix is evaluated.
    grads : StateGradients
        Spatial derivatives of the reference state at the same point.
    h_approx : float
        The h-component of the approximating family at this point.
    g : GasParams
    """
    if h_approx <= 0.0:
        raise ValueError(f"h_approx must be positive, got {h_approx}")
    div = grads.u_x + grads.v_y
    return _finite(
        np.array(
            [
                [div, grads.rho_x, grads.rho_y, 0.0],
                [
                    -h_approx * grads.rho_x / (p.rho * g.rho0),
                    grads.u_x,
                    grads.u_y,
                    grads.rho_x / p.rho,
                ],
                [
                    -h_approx * grads.rho_y / (p.rho * g.rho0),
                    grads.v_x,
                    grads.v_y,
                    grads.rho_y / p.rho,
                ],
                [0.0, grads.h_x, grads.h_y, (g.gamma - 1.0) * div],
            ]
        )
    )


def symmetrizer_floor(g: GasParams) -> float:
    """Lower eigenvalue bound of A0 at the base state (rho0, 0, 0, h0)."""
    return min(
        g.rho0,
        g.h0 / (2.0 * g.rho0),
        g.rho0 / (2.0 * (g.gamma - 1.0) * g.h0),
    )


@dataclass
class State:
    """The PDE unknown U = (rho, u, v, h) as four fields on one grid."""

    rho: Field
    u: Field
    v: Field
    h: Field

    def __post_init__(self) -> None:
        sizes = {f.grid.size for f in self.fields()}
        if len(sizes) != 1:
            raise ValueError(f"state components live on different grids: {sizes}")

    def fields(self) -> tuple[Field, Field, Field, Field]:
        return (self.rho, self.u, self.v, self.h)

    @property
    def grid(self) -> TorusGrid:
        return self.rho.grid

    def min_rho(self) -> float:
        return float(np.min(self.rho.samples))

    def min_h(self) -> float:
        return float(np.min(self.h.samples))

    def require_admissible(self, floor: float = REGION_FLOOR) -> None:
        """Raise AdmissibleStateError unless min(rho) and min(h) exceed floor."""
        for name, value in (("rho", self.min_rho()), ("h", self.min_h())):
            if not value > floor:
                raise AdmissibleStateError(
                    f"state left the admissible region: min({name}) = {value:.6e} "
                    f"<= floor {floor:.1e}"
                )


def state_norm(s: State, sigma: float) -> float:
    """Sobolev norm of the state: Euclidean sum over the four components."""
    return float(
        np.sqrt(sum(spectral.sobolev_norm(f, sigma) ** 2 for f in s.fields()))
    )


def state_difference(a: State, b: State) -> State:
    """Componentwise difference a - b (no admissibility requirement)."""
    return State(a.rho - b.rho, a.u - b.u, a.v - b.v, a.h - b.h)


def base_deviation(s: State, g: GasParams) -> State:
    """Subtract the stationary base state (rho0, 0, 0, h0)."""
    grid = s.grid
    return State(
        Field(grid, samples=s.rho.samples - g.rho0),
        s.u,
        s.v,
        Field(grid, samples=s.h.samples - g.h0),
    )


def rhs(
    s: State,
    g: GasParams,
    floor: float = REGION_FLOOR,
    dealias_products: bool = True,
) -> State:
    """Right-hand side -(A(U) U_x + B(U) U_y) of U_t = rhs(U).

    Derivatives are spectral; products are formed pointwise in physical
    space and each assembled component is dealiased once.
    """
    s.require_admissible(floor)
    grid = s.grid
    rho, u, v, h = (f.samples for f in s.fields())
    rho_x = spectral.partial_x(s.rho).samples
    rho_y = spectral.partial_y(s.rho).samples
    u_x = spectral.partial_x(s.u).samples
    u_y = spectral.partial_y(s.u).samples
    v_x = spectral.partial_x(s.v).samples
    v_y = spectral.partial_y(s.v).samples
    h_x = spectral.partial_x(s.h).samples
    h_y = spectral.partial_y(s.h).samples

    div = u_x + v_y
    out_rho = -(u * rho_x + v * rho_y + rho * div)
    out_u = -(u * u_x + v * u_y + h_x + (h / rho) * rho_x)
    out_v = -(u * v_x + v * v_y + h_y + (h / rho) * rho_y)
    out_h = -(u * h_x + v * h_y + (g.gamma - 1.0) * h * div)

    components = []
    for values in (out_rho, out_u, out_v, out_h):
        f = Field(grid, samples=values)
        components.append(spectral.dealias(f) if dealias_products else f)
    return State(*components)


def divergence(s: State) -> Field:
    """Velocity divergence u_x + v_y."""
    return spectral.partial_x(s.u) + spectral.partial_y(s.v)


def max_wave_speed(s: State, g: GasParams, floor: float = REGION_FLOOR) -> float:
    """Largest characteristic speed max(|u| + c, |v| + c) with c = sqrt(gamma h)."""
    s.require_admissible(floor)
    c = np.sqrt(g.gamma * s.h.samples)
    speed_x = np.abs(s.u.samples) + c
    speed_y = np.abs(s.v.samples) + c
    return float(max(speed_x.max(), speed_y.max()))
