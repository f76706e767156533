"""Fourier calculus on the 2pi-periodic square torus.

Provides the uniform grid, real scalar fields with cached spectral
coefficients, exact differentiation of band-limited fields, the fractional
smoothing operator (1 - Laplacian)^(sigma/2), Sobolev norms of fractional
order, two-thirds-rule dealiasing, and trigonometric synthesis.

Conventions
-----------
Samples are stored as ``f[i, j] = f(x_i, y_j)`` with ``x_i = 2*pi*i/N``.
Spectral coefficients use the amplitude normalization

    f(x, y) = sum_k c_k exp(i (kx*x + ky*y)),

i.e. ``c = fft2(samples) / N**2``.  The Sobolev norm uses the un-normalized
2pi-periodic measure, so the constant field 1 has L2 norm 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.fft as sfft

__all__ = [
    "TorusGrid",
    "Field",
    "make_grid",
    "synthesize",
    "field_from_samples",
    "field_from_coefficients",
    "partial_x",
    "partial_y",
    "lambda_pow",
    "sobolev_norm",
    "dealias",
    "field_to_csv",
    "field_to_spectral_json",
]


@dataclass(frozen=True, eq=False)
class TorusGrid:
    """Uniform N-by-N grid on the square torus of period 2*pi per axis.

    Attributes
    ----------
    size : int
        Points per axis; even and at least 4.
    x : ndarray
        Node coordinates ``2*pi*j/size`` for one axis.
    wavenumbers : ndarray
        Integer wavenumber table in standard DFT bin order.  Bin j holds
        the representative of j mod size taken from {-size/2+1, ..., size/2}.
    """

    size: int
    x: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)

    period: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        n = self.size
        if not isinstance(n, (int, np.integer)):
            raise TypeError(f"grid size must be an integer, got {n!r}")
        if n < 4 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 4, got {n}")
        x = self.period * np.arange(n) / n
        k = sfft.fftfreq(n, d=1.0 / n).astype(np.int64)
        # fftfreq labels the half-way bin -n/2; relabel it +n/2 so the table
        # is exactly {-n/2+1, ..., n/2}.  The bin is sign-ambiguous either
        # way and is excluded from synthesis and differentiation.
        k[n // 2] = n // 2
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "_ksq", self._make_ksq())
        object.__setattr__(self, "_dealias_mask", self._make_dealias_mask())

    def _make_ksq(self) -> np.ndarray:
        k = self.wavenumbers.astype(np.float64)
        ksq = k[:, None] ** 2 + k[None, :] ** 2
        ksq.setflags(write=False)
        return ksq

    def _make_dealias_mask(self) -> np.ndarray:
        k = np.abs(self.wavenumbers)
        cutoff = self.size // 3
        keep = (k[:, None] <= cutoff) & (k[None, :] <= cutoff)
        keep.setflags(write=False)
        return keep

    @property
    def dealias_cutoff(self) -> int:
        """Largest wavenumber magnitude kept by the two-thirds rule."""
        return self.size // 3

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Return broadcastable coordinate arrays X (axis 0) and Y (axis 1)."""
        return self.x[:, None], self.x[None, :]


def make_grid(size: int) -> TorusGrid:
    """Build the uniform torus grid with ``size`` points per axis."""
    return TorusGrid(size)


class Field:
    """Real scalar field on a :class:`TorusGrid`.

    Immutable after construction.  Physical samples and spectral
    coefficients are two views of the same data; whichever was not supplied
    is computed lazily and cached.  Coefficients of a real field satisfy
    the conjugate symmetry ``c[-k] = conj(c[k])``.
    """

    __slots__ = ("grid", "_samples", "_coefficients")

    def __init__(
        self,
        grid: TorusGrid,
        samples: np.ndarray | None = None,
        coefficients: np.ndarray | None = None,
    ) -> None:
        if samples is None and coefficients is None:
            raise ValueError("Field needs samples or coefficients")
        n = grid.size
        if samples is not None:
            samples = np.asarray(samples, dtype=np.float64)
            if samples.shape != (n, n):
                raise ValueError(
                    f"samples shape {samples.shape} does not match grid {(n, n)}"
                )
            if not np.all(np.isfinite(samples)):
                raise ValueError("field samples must be finite")
            samples = samples.copy()
            samples.setflags(write=False)
        if coefficients is not None:
            coefficients = np.asarray(coefficients, dtype=np.complex128)
            if coefficients.shape != (n, n):
                raise ValueError(
                    f"coefficient shape {coefficients.shape} does not match grid {(n, n)}"
                )
            if not np.all(np.isfinite(coefficients)):
                raise ValueError("field coefficients must be finite")
            coefficients = coefficients.copy()
            coefficients.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "_samples", samples)
        object.__setattr__(self, "_coefficients", coefficients)

    def __setattr__(self, name: str, value) -> None:
        raise AttributeError("Field is immutable")

    @property
    def samples(self) -> np.ndarray:
        """Physical-space values, shape (N, N), read-only."""
        if self._samples is None:
            n = self.grid.size
            full = sfft.ifft2(self._coefficients, norm="forward")
            real = full.real
            scale = np.max(np.abs(real)) + 1.0
            if np.max(np.abs(full.imag)) > 1e-8 * scale:
                raise ValueError(
                    "coefficients lack the conjugate symmetry of a real field"
                )
            real = np.ascontiguousarray(real)
            real.setflags(write=False)
            object.__setattr__(self, "_samples", real)
        return self._samples

    @property
    def coefficients(self) -> np.ndarray:
        """Normalized Fourier coefficients, shape (N, N), read-only."""
        if self._coefficients is None:
            c = sfft.fft2(self._samples, norm="forward")
            c.setflags(write=False)
            object.__setattr__(self, "_coefficients", c)
        return self._coefficients

    def __add__(self, other: "Field") -> "Field":
        _require_same_grid(self, other)
        if self._prefers_spectral() and other._prefers_spectral():
            return Field(self.grid, coefficients=self.coefficients + other.coefficients)
        return Field(self.grid, samples=self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        _require_same_grid(self, other)
        if self._prefers_spectral() and other._prefers_spectral():
            return Field(self.grid, coefficients=self.coefficients - other.coefficients)
        return Field(self.grid, samples=self.samples - other.samples)

    def __mul__(self, scalar: float) -> "Field":
        s = float(scalar)
        if self._prefers_spectral():
            return Field(self.grid, coefficients=self.coefficients * s)
        return Field(self.grid, samples=self.samples * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self * (-1.0)

    def _prefers_spectral(self) -> bool:
        return self._coefficients is not None and self._samples is None

    def mean(self) -> float:
        """Mean value over the torus (the k = 0 coefficient)."""
        if self._coefficients is not None:
            return float(self._coefficients[0, 0].real)
        return float(np.mean(self._samples))


def _require_same_grid(a: Field, b: Field) -> None:
    if a.grid is not b.grid and a.grid.size != b.grid.size:
        raise ValueError("fields live on different grids")


def field_from_samples(grid: TorusGrid, samples: np.ndarray) -> Field:
    """Wrap an (N, N) array of physical samples as a Field."""
    return Field(grid, samples=samples)


def field_from_coefficients(grid: TorusGrid, coefficients: np.ndarray) -> Field:
    """Wrap an (N, N) array of normalized Fourier coefficients as a Field."""
    return Field(grid, coefficients=coefficients)


def constant_field(grid: TorusGrid, value: float) -> Field:
    """Field with the same value at every node."""
    return Field(grid, samples=np.full((grid.size, grid.size), float(value)))


def synthesize(
    grid: TorusGrid,
    modes: Iterable[Sequence],
) -> Field:
    """Sum of explicit trigonometric modes, sampled pointwise.

    Parameters
    ----------
    grid : TorusGrid
    modes : iterable of (kx, ky, amplitude, kind, phase)
        ``kind`` is ``"cos"`` or ``"sin"``; the mode contributes
        ``amplitude * kind(kx*x + ky*y + phase)``.  Wavenumbers must
        satisfy ``|kx|, |ky| <= N/2 - 1`` so the mode is represented
        without aliasing; the sign-ambiguous bin N/2 is rejected.

    Returns
    -------
    Field
        Samples equal to the pointwise sum of the requested modes.
    """
    n = grid.size
    limit = n // 2 - 1
    xcol, yrow = grid.meshgrid()
    total = np.zeros((n, n))
    for mode in modes:
        kx, ky, amplitude, kind, phase = mode
        if int(kx) != kx or int(ky) != ky:
            raise ValueError(f"mode wavenumbers must be integers, got {(kx, ky)}")
        if abs(int(kx)) > limit or abs(int(ky)) > limit:
            raise ValueError(
                f"mode {(kx, ky)} is not representable on an N={n} grid "
                f"(|k| must not exceed {limit})"
            )
        theta = int(kx) * xcol + int(ky) * yrow + float(phase)
        if kind == "cos":
            total += float(amplitude) * np.cos(theta)
        elif kind == "sin":
            total += float(amplitude) * np.sin(theta)
        else:
            raise ValueError(f"mode kind must be 'cos' or 'sin', got {kind!r}")
    return Field(grid, samples=total)


def partial_x(f: Field) -> Field:
    """Spectral derivative in x; exact for band-limited fields."""
    return _derivative(f, axis=0)


def partial_y(f: Field) -> Field:
    """Spectral derivative in y; exact for band-limited fields."""
    return _derivative(f, axis=1)


def _derivative(f: Field, axis: int) -> Field:
    grid = f.grid
    n = grid.size
    k = grid.wavenumbers.astype(np.float64).copy()
    # The half-way bin N/2 carries no sign information for a real field;
    # zeroing it keeps the derivative real and exact on the synthesis band.
    k[n // 2] = 0.0
    shape = (n, 1) if axis == 0 else (1, n)
    multiplier = (1j * k).reshape(shape)
    return Field(grid, coefficients=f.coefficients * multiplier)


def lambda_pow(f: Field, sigma: float) -> Field:
    """Apply the Fourier multiplier (1 + |k|^2)^(sigma/2)."""
    weight = (1.0 + f.grid._ksq) ** (0.5 * float(sigma))
    return Field(f.grid, coefficients=f.coefficients * weight)


def sobolev_norm(f: Field, sigma: float) -> float:
    """Fractional Sobolev norm of order sigma.

    Computed in spectral space as

        2*pi * sqrt( sum_k (1 + |k|^2)^sigma |c_k|^2 ),

    which equals the L2 norm of (1 - Laplacian)^(sigma/2) f under the
    2pi-periodic measure.  ``sobolev_norm(f, 0)`` is the plain L2 norm.
    """
    weight = (1.0 + f.grid._ksq) ** float(sigma)
    c = f.coefficients
    total = np.sum(weight * (c.real**2 + c.imag**2))
    return float(2.0 * np.pi * np.sqrt(total))


def dealias(f: Field) -> Field:
    """Zero every coefficient with max(|kx|, |ky|) above floor(N/3)."""
    return Field(f.grid, coefficients=f.coefficients * f.grid._dealias_mask)


def field_to_csv(f: Field, path) -> None:
    """Write samples as CSV rows ``x,y,value`` in row-major node order."""
    x = [float(v) for v in f.grid.x]
    values = f.samples
    with open(path, "w", encoding="ascii") as handle:
        handle.write("x,y,value\n")
        for i in range(f.grid.size):
            for j in range(f.grid.size):
                handle.write(f"{x[i]!r},{x[j]!r},{float(values[i, j])!r}\n")


def field_to_spectral_json(f: Field, threshold: float = 1e-14) -> dict:
    """Spectral dump {N, modes: [...]} of coefficients above ``threshold``.

    Modes are listed in (kx, ky) lexicographic order for reproducibility.
    """
    k = f.grid.wavenumbers
    c = f.coefficients
    entries = []
    order = np.argsort(k, kind="stable")
    for i in order:
        for j in order:
            value = c[i, j]
            if abs(value) > threshold:
                entries.append(
                    {
                        "kx": int(k[i]),
                        "ky": int(k[j]),
                        "re": float(value.real),
                        "im": float(value.imag),
                    }
                )
    return {"N": f.grid.size, "modes": entries}
