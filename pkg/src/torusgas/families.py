"""Closed-form solution families indexed by a frequency pair (omega, n).

Two sequences of states drive every experiment here.  The first is an
exact travelling-wave family with constant density,

    V = (rho0, n^{-s} cos(n y - omega t), omega/n, h0),

which solves the gas system identically and is divergence-free.  The
second is an approximate family

    U = (rho0,
         omega/n + n^{-s} cos(n y - omega t),
         omega/n + n^{-s} cos(n x - omega t),
         h0 + n^{-2s} sin(n x - omega t) sin(n y - omega t)),

which satisfies the system up to a residue appearing only in the fourth
equation.  The residue, its norm envelope, and the closed-form difference
of the omega = +1 and omega = -1 members are provided as generators so
downstream checks never rely on numerically assembled versions of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .euler import GasParams, State
from .spectral import Field, TorusGrid, constant_field, partial_x, partial_y, sobolev_norm

__all__ = [
    "FamilyParams",
    "exact_solution",
    "exact_time_derivative",
    "approx_solution",
    "approx_time_derivative",
    "initial_data",
    "residue_field",
    "residue_norm_bound",
    "approx_difference",
    "assemble_approx_residual",
    "residue_identity_errors",
]


@dataclass(frozen=True)
class FamilyParams:
    """Family index: sign omega, frequency n, and the regularity s."""

    omega: int
    n: int
    s: float

    def __post_init__(self) -> None:
        if self.omega not in (-1, 1):
            raise ValueError(f"omega must be +1 or -1, got {self.omega}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.s > 2.0:
            raise ValueError(f"s must exceed 2, got {self.s}")


def _require_resolved(grid: TorusGrid, top_mode: int, what: str) -> None:
    if top_mode > grid.dealias_cutoff:
        raise ValueError(
            f"{what} carries modes up to {top_mode}, beyond the dealias band "
            f"{grid.dealias_cutoff} of an N={grid.size} grid"
        )


def _full(grid: TorusGrid, values: np.ndarray) -> Field:
    n = grid.size
    return Field(grid, samples=np.broadcast_to(values, (n, n)))


def exact_solution(f: FamilyParams, g: GasParams, grid: TorusGrid, t: float) -> State:
    """Exact travelling-wave member at time t."""
    _require_resolved(grid, f.n, "exact family")
    _, yrow = grid.meshgrid()
    u = f.n ** (-f.s) * np.cos(f.n * yrow - f.omega * t)
    return State(
        constant_field(grid, g.rho0),
        _full(grid, u),
        constant_field(grid, f.omega / f.n),
        constant_field(grid, g.h0),
    )


def exact_time_derivative(f: FamilyParams, grid: TorusGrid, t: float) -> State:
    """Hand-differentiated time derivative of the exact member."""
    _require_resolved(grid, f.n, "exact family")
    _, yrow = grid.meshgrid()
    du = f.omega * f.n ** (-f.s) * np.sin(f.n * yrow - f.omega * t)
    zero = constant_field(grid, 0.0)
    return State(zero, _full(grid, du), zero, zero)


def approx_solution(f: FamilyParams, g: GasParams, grid: TorusGrid, t: float) -> State:
    """Approximate-family member at time t.

    Requires 2n within the dealias band: quadratic products of this state
    carry modes up to 2n and the residue identities need them resolved.
    """
    _require_resolved(grid, 2 * f.n, "approximate family")
    xcol, yrow = grid.meshgrid()
    amp = f.n ** (-f.s)
    drift = f.omega / f.n
    u = drift + amp * np.cos(f.n * yrow - f.omega * t)
    v = drift + amp * np.cos(f.n * xcol - f.omega * t)
    h = g.h0 + f.n ** (-2.0 * f.s) * np.sin(f.n * xcol - f.omega * t) * np.sin(
        f.n * yrow - f.omega * t
    )
    return State(
        constant_field(grid, g.rho0),
        _full(grid, u),
        _full(grid, v),
        Field(grid, samples=h),
    )


def approx_time_derivative(f: FamilyParams, grid: TorusGrid, t: float) -> State:
    """Hand-differentiated time derivative of the approximate member."""
    _require_resolved(grid, 2 * f.n, "approximate family")
    xcol, yrow = grid.meshgrid()
    amp = f.omega * f.n ** (-f.s)
    du = amp * np.sin(f.n * yrow - f.omega * t)
    dv = amp * np.sin(f.n * xcol - f.omega * t)
    dh = -f.omega * f.n ** (-2.0 * f.s) * np.sin(
        f.n * (xcol + yrow) - 2.0 * f.omega * t
    )
    return State(
        constant_field(grid, 0.0),
        _full(grid, du),
        _full(grid, dv),
        Field(grid, samples=dh),
    )


def initial_data(f: FamilyParams, g: GasParams, grid: TorusGrid) -> State:
    """Initial state shared by the approximate member and the evolved run."""
    _require_resolved(grid, 2 * f.n, "family initial data")
    xcol, yrow = grid.meshgrid()
    amp = f.n ** (-f.s)
    drift = f.omega / f.n
    u = drift + amp * np.cos(f.n * yrow)
    v = drift + amp * np.cos(f.n * xcol)
    h = g.h0 + f.n ** (-2.0 * f.s) * np.sin(f.n * xcol) * np.sin(f.n * yrow)
    return State(
        constant_field(grid, g.rho0),
        _full(grid, u),
        _full(grid, v),
        Field(grid, samples=h),
    )


def residue_field(
    f: FamilyParams, grid: TorusGrid, t: float, form: str = "product"
) -> Field:
    """Residue of the approximate family (fourth equation only).

    Two algebraically equal closed forms are available: ``"product"``
    evaluates

        n^{1-3s} cos(nx - wt) cos(ny - wt) (sin(nx - wt) + sin(ny - wt))

    and ``"sum"`` the product-to-sum rewriting

        (sin 2(nx - wt) cos(ny - wt) + cos(nx - wt) sin 2(ny - wt)) / (2 n^{3s-1}).
    """
    _require_resolved(grid, 2 * f.n, "residue")
    xcol, yrow = grid.meshgrid()
    a = f.n * xcol - f.omega * t
    b = f.n * yrow - f.omega * t
    prefactor = f.n ** (1.0 - 3.0 * f.s)
    if form == "product":
        values = prefactor * np.cos(a) * np.cos(b) * (np.sin(a) + np.sin(b))
    elif form == "sum":
        values = 0.5 * prefactor * (
            np.sin(2.0 * a) * np.cos(b) + np.cos(a) * np.sin(2.0 * b)
        )
    else:
        raise ValueError(f"form must be 'product' or 'sum', got {form!r}")
    return Field(grid, samples=values)


def residue_norm_bound(f: FamilyParams, sigma: float) -> float:
    """Reference envelope n^{2 sigma - 3s + 1} for the residue norm decay.

    This is the constant-free shape of the analytic upper bound; scaling
    experiments normalize it at their smallest n.
    """
    if not 1.0 < sigma <= f.s - 1.0:
        raise ValueError(
            f"sigma must lie in (1, s-1] = (1, {f.s - 1.0}], got {sigma}"
        )
    if f.n < 2:
        raise ValueError("the envelope is meaningful only for n >= 2")
    return float(f.n) ** (2.0 * sigma - 3.0 * f.s + 1.0)


def approx_difference(n: int, s: float, grid: TorusGrid, t: float) -> State:
    """Closed-form difference of the omega = +1 and omega = -1 members.

    Equals approx_solution(+1, n) - approx_solution(-1, n) by trigonometric
    identities:

        (0,
         2/n + 2 n^{-s} sin(ny) sin t,
         2/n + 2 n^{-s} sin(nx) sin t,
         -n^{-2s} sin(nx + ny) sin 2t).
    """
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n must be a positive integer, got {n}")
    if not s > 2.0:
        raise ValueError(f"s must exceed 2, got {s}")
    _require_resolved(grid, 2 * n, "family difference")
    xcol, yrow = grid.meshgrid()
    du = 2.0 / n + 2.0 * n ** (-s) * np.sin(n * yrow) * np.sin(t)
    dv = 2.0 / n + 2.0 * n ** (-s) * np.sin(n * xcol) * np.sin(t)
    dh = -(n ** (-2.0 * s)) * np.sin(n * (xcol + yrow)) * np.sin(2.0 * t)
    return State(
        constant_field(grid, 0.0),
        _full(grid, du),
        _full(grid, dv),
        Field(grid, samples=dh),
    )


def assemble_approx_residual(
    f: FamilyParams, g: GasParams, grid: TorusGrid, t: float
) -> State:
    """Numerically assembled dU/dt + A(U) U_x + B(U) U_y for the approximate
    family, one component per equation.

    Derivatives are taken spectrally on the deviation from the constant
    background (rho0, omega/n, omega/n, h0); since the background has zero
    derivative this is exact, and it keeps round-off at the scale of the
    perturbations instead of the scale of the background.  Coefficients use
    the full field values and products are formed pointwise.
    """
    _require_resolved(grid, 2 * f.n, "assembled residue")
    xcol, yrow = grid.meshgrid()
    a = f.n * xcol - f.omega * t
    b = f.n * yrow - f.omega * t
    amp = f.n ** (-f.s)
    amp2 = f.n ** (-2.0 * f.s)
    drift = f.omega / f.n

    u_dev = Field(grid, samples=np.broadcast_to(amp * np.cos(b), (grid.size, grid.size)).copy())
    v_dev = Field(grid, samples=np.broadcast_to(amp * np.cos(a), (grid.size, grid.size)).copy())
    h_dev = Field(grid, samples=amp2 * np.sin(a) * np.sin(b))

    u_x = partial_x(u_dev).samples
    u_y = partial_y(u_dev).samples
    v_x = partial_x(v_dev).samples
    v_y = partial_y(v_dev).samples
    h_x = partial_x(h_dev).samples
    h_y = partial_y(h_dev).samples

    rho = g.rho0
    u = drift + u_dev.samples
    v = drift + v_dev.samples
    h = g.h0 + h_dev.samples
    dt = approx_time_derivative(f, grid, t)

    r_rho = dt.rho.samples + rho * (u_x + v_y)
    r_u = dt.u.samples + u * u_x + v * u_y + h_x
    r_v = dt.v.samples + u * v_x + v * v_y + h_y
    r_h = dt.h.samples + u * h_x + v * h_y + (g.gamma - 1.0) * h * (u_x + v_y)
    return State(
        Field(grid, samples=r_rho),
        Field(grid, samples=r_u),
        Field(grid, samples=r_v),
        Field(grid, samples=r_h),
    )


def residue_identity_errors(
    f: FamilyParams, g: GasParams, grid: TorusGrid, t: float
) -> tuple[float, float, float, float]:
    """Componentwise relative L2 errors of the identity

        dU/dt + A(U) U_x + B(U) U_y = (0, 0, 0, residue).

    The fourth component is measured against the closed-form residue norm.
    The first three have a zero target, so each is normalized by the L2
    size of its own advective terms (the quantity the assembly cancels);
    a component whose terms all vanish identically scores zero.
    """
    res = assemble_approx_residual(f, g, grid, t)
    target = residue_field(f, grid, t)
    xcol, yrow = grid.meshgrid()
    a = f.n * xcol - f.omega * t
    b = f.n * yrow - f.omega * t
    amp = f.n ** (-f.s)
    drift = f.omega / f.n

    u_dev = Field(grid, samples=np.broadcast_to(amp * np.cos(b), (grid.size, grid.size)).copy())
    v_dev = Field(grid, samples=np.broadcast_to(amp * np.cos(a), (grid.size, grid.size)).copy())
    u_y = partial_y(u_dev).samples
    v_x = partial_x(v_dev).samples
    scale_u = sobolev_norm(Field(grid, samples=(drift + v_dev.samples) * u_y), 0.0)
    scale_v = sobolev_norm(Field(grid, samples=(drift + u_dev.samples) * v_x), 0.0)

    def _rel(residual: Field, scale: float) -> float:
        size = sobolev_norm(residual, 0.0)
        if scale == 0.0:
            return size
        return size / scale

    err_rho = _rel(res.rho, 0.0)
    err_u = _rel(res.u, scale_u)
    err_v = _rel(res.v, scale_v)
    diff_h = Field(grid, samples=res.h.samples - target.samples)
    err_h = _rel(diff_h, sobolev_norm(target, 0.0))
    return (err_rho, err_u, err_v, err_h)
