"""Uniform time grids and fixed-order quadrature for complex samples.

Everything downstream (closed forms for overlaps, purities, energies) is
checked against the rules in this module, so they are deliberately plain:
composite Simpson on odd grids, trapezoid on even ones, no adaptivity.

The two-dimensional rule knows one thing about the kernels in this package:
pure dephasing puts a derivative jump on the diagonal ``t == t'``.  Each row
is therefore integrated separately below and above the diagonal, and the
resulting weight matrix is symmetrised so Hermitian kernels integrate to a
real number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

#: Default window length in units of the emitter lifetime ``1/gamma``.
DEFAULT_WINDOW = 16.0
#: Default number of samples; odd so that Simpson's rule applies.
DEFAULT_POINTS = 2049


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if not self.n_points >= 2:
            raise InvalidArgumentError(f"n_points must be >= 2, got {self.n_points}")
        if not self.t_end > self.t_start:
            raise InvalidArgumentError(
                f"t_end ({self.t_end}) must exceed t_start ({self.t_start})"
            )

    @property
    def step(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return _grid_points(self.t_start, self.t_end, self.n_points)

    def same_as(self, other: "TimeGrid") -> bool:
        return (
            self.n_points == other.n_points
            and self.t_start == other.t_start
            and self.t_end == other.t_end
        )


@dataclass(frozen=True, eq=False)
class SampledAmplitude:
    """Complex samples of a one-time function on a grid."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidArgumentError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class SampledKernel:
    """Complex samples of a two-time function ``k(t, t')``; row index is ``t``."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(complex)
        n = self.grid.n_points
        if values.shape != (n, n):
            raise InvalidArgumentError(
                f"expected a {n}x{n} kernel, got shape {values.shape}"
            )
        if values.flags.writeable:
            values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def diagonal(self) -> SampledAmplitude:
        return SampledAmplitude(self.grid, np.diagonal(self.values).copy())

    def is_hermitian(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.values, self.values.conj().T, rtol=0.0, atol=atol))


def make_grid(t_end: float, n_points: int) -> TimeGrid:
    """Uniform grid on ``[0, t_end]``; the emitter is excited at ``t = 0``."""
    if not t_end > 0:
        raise InvalidArgumentError(f"t_end must be positive, got {t_end}")
    if int(n_points) != n_points or n_points < 2:
        raise InvalidArgumentError(f"n_points must be an integer >= 2, got {n_points}")
    return TimeGrid(0.0, float(t_end), int(n_points))


def default_grid(gamma: float, n_points: int = DEFAULT_POINTS) -> TimeGrid:
    """Grid covering ``DEFAULT_WINDOW`` lifetimes of an emitter with rate ``gamma``."""
    if not gamma > 0:
        raise InvalidArgumentError(f"gamma must be positive, got {gamma}")
    return make_grid(DEFAULT_WINDOW / gamma, n_points)


def integrate(a: SampledAmplitude) -> complex:
    """Composite Simpson (odd ``n_points``) or trapezoid (even) estimate of the integral."""
    w = _weights_1d(a.grid.t_start, a.grid.t_end, a.grid.n_points)
    return complex(np.dot(w, a.values))


def integrate2d(k: SampledKernel) -> complex:
    """Product-rule estimate of the double integral of ``k`` over the grid square."""
    g = k.grid
    w = _weights_2d(g.t_start, g.t_end, g.n_points)
    vals = k.values
    if np.iscomplexobj(vals):
        re = np.einsum("ij,ij->", w, vals.real)
        im = np.einsum("ij,ij->", w, vals.imag)
        return complex(re, im)
    return complex(np.einsum("ij,ij->", w, vals))


def integrate2d_real(grid: TimeGrid, values: np.ndarray) -> float:
    """Same rule as :func:`integrate2d` for a real ``n x n`` array, without wrapping."""
    w = _weights_2d(grid.t_start, grid.t_end, grid.n_points)
    return float(np.einsum("ij,ij->", w, values))


def overlap2d(grid: TimeGrid, a: np.ndarray, b: np.ndarray) -> float:
    """``Re`` of the double integral of ``a(t, t') * conj(b(t, t'))`` with the 2D rule."""
    w = _weights_2d(grid.t_start, grid.t_end, grid.n_points)
    return float(np.vdot(b, w * a).real)


def quadratic_form2d(grid: TimeGrid, k: np.ndarray, u: np.ndarray) -> complex:
    """Double integral of ``conj(u(t)) k(t, t') u(t')``, i.e. of ``k`` against a rank-one kernel."""
    w = _weights_2d(grid.t_start, grid.t_end, grid.n_points)
    return complex(np.vdot(u, (w * k) @ u))


def abs_time_difference(grid: TimeGrid) -> np.ndarray:
    """Read-only ``|t - t'|`` matrix for ``grid`` (cached)."""
    return _abs_diff(grid.t_start, grid.t_end, grid.n_points)


# -- weight construction ----------------------------------------------------


def _interval_weights(m: int, h: float) -> np.ndarray:
    # Weights for m equal intervals: Simpson, with a 3/8 tail when m is odd.
    w = np.zeros(m + 1)
    if m == 0:
        return w
    if m == 1:
        w[:] = h / 2.0
        return w
    k = m if m % 2 == 0 else m - 3
    if k > 0:
        w[0 : k + 1 : 2] += 2.0 * h / 3.0
        w[1:k:2] += 4.0 * h / 3.0
        w[0] -= h / 3.0
        w[k] -= h / 3.0
    if m % 2 == 1:
        w[k : k + 4] += np.array([3.0, 9.0, 9.0, 3.0]) * h / 8.0
    return w


@lru_cache(maxsize=16)
def _grid_points(t_start, t_end, n):
    pts = np.linspace(t_start, t_end, n)
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=16)
def _weights_1d(t_start, t_end, n):
    h = (t_end - t_start) / (n - 1)
    if n % 2 == 1:
        w = _interval_weights(n - 1, h)
    else:
        w = np.full(n, h)
        w[0] = w[-1] = h / 2.0
    w.setflags(write=False)
    return w


@lru_cache(maxsize=6)
def _weights_2d(t_start, t_end, n):
    h = (t_end - t_start) / (n - 1)
    outer = _weights_1d(t_start, t_end, n)
    if n % 2 == 0:
        # trapezoid is insensitive to a kink that sits on a node
        w = np.outer(outer, outer)
    else:
        w = np.empty((n, n))
        for i in range(n):
            below = _interval_weights(i, h)
            above = _interval_weights(n - 1 - i, h)
            row = np.zeros(n)
            row[: i + 1] += below
            row[i:] += above
            w[i] = outer[i] * row
        w += w.T
        w *= 0.5
    w.setflags(write=False)
    return w


@lru_cache(maxsize=6)
def _abs_diff(t_start, t_end, n):
    t = _grid_points(t_start, t_end, n)
    d = np.abs(t[:, None] - t[None, :])
    d.setflags(write=False)
    return d
