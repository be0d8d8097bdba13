"""Field emitted by a resonantly driven two-level emitter, truncated to {0, 1} photons.

A state is described by the vacuum/one-photon populations, the temporal
density ``xi(t, t')`` of its one-photon part and the amplitude ``zeta(t)`` of
its vacuum/one-photon coherence.  Energies and photon numbers are in units of
``hbar * omega0``; the carrier ``exp(-i omega0 t)`` is kept in the samples so
overlaps between frequency-shifted copies are computed literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_hermitenorm

from .errors import DegenerateStateError, InvalidArgumentError
from .timegrid import (
    SampledAmplitude,
    SampledKernel,
    TimeGrid,
    abs_time_difference,
    integrate,
    overlap2d,
    quadratic_form2d,
)

_DIFFUSION_KINDS = ("delta", "gaussian")


@dataclass(frozen=True)
class DiffusionDist:
    """Distribution of the quasi-static emission-frequency shift."""

    kind: str = "delta"
    offset: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _DIFFUSION_KINDS:
            raise InvalidArgumentError(f"unknown diffusion kind {self.kind!r}")
        if self.sigma < 0:
            raise InvalidArgumentError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class EmitterParams:
    gamma: float
    gamma_star: float = 0.0
    omega0: float = 0.0
    diffusion: DiffusionDist = field(default_factory=DiffusionDist)

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidArgumentError(f"gamma must be positive, got {self.gamma}")
        if not self.gamma_star >= 0:
            raise InvalidArgumentError(f"gamma_star must be >= 0, got {self.gamma_star}")

    @property
    def emission_frequency(self) -> float:
        """Carrier of a single emission event: nominal frequency plus the shift."""
        return self.omega0 + self.diffusion.offset


@dataclass(frozen=True, eq=False)
class PhotonicState:
    p0: float
    p1: float
    xi: SampledKernel = field(repr=False)
    zeta: SampledAmplitude = field(repr=False)
    theta: float
    alpha: float
    params: EmitterParams

    @property
    def grid(self) -> TimeGrid:
        return self.xi.grid

    @property
    def mean_field(self) -> SampledAmplitude:
        """Coherent amplitude ``<a(t)> = sqrt(p0 p1) zeta(t)``."""
        return SampledAmplitude(self.grid, math.sqrt(self.p0 * self.p1) * self.zeta.values)

    @property
    def intensity(self) -> np.ndarray:
        """Envelope ``I(t) = p1 xi(t, t)``."""
        return self.p1 * np.real(np.diagonal(self.xi.values))

    @property
    def mean_photon_number(self) -> float:
        return float(integrate(SampledAmplitude(self.grid, self.intensity)).real)

    @property
    def g2(self) -> float:
        # the {0,1} truncation has no two-photon component
        return 0.0


@dataclass(frozen=True, eq=False)
class ClassicalField:
    beta: SampledAmplitude = field(repr=False)
    mu_c: float

    @property
    def grid(self) -> TimeGrid:
        return self.beta.grid

    @property
    def mean_photon_number(self) -> float:
        return self.mu_c

    @property
    def g2(self) -> float:
        return 1.0


def ideal_wavefunction(params: EmitterParams, grid: TimeGrid) -> SampledAmplitude:
    """``sqrt(gamma) exp(-gamma t / 2 - i omega t)`` at the emission frequency."""
    if grid.t_start != 0.0:
        raise InvalidArgumentError("the emission grid must start at t = 0")
    t = grid.points
    g = params.gamma
    values = math.sqrt(g) * np.exp(-0.5 * g * t - 1j * params.emission_frequency * t)
    return SampledAmplitude(grid, values)


def build_state(theta: float, alpha: float, params: EmitterParams, grid: TimeGrid) -> PhotonicState:
    """Field state left by a pulse of area ``theta`` and phase ``alpha``.

    Pure dephasing at rate ``gamma_star`` multiplies the one-photon coherence
    by ``exp(-gamma_star |t - t'|)`` and damps the number coherence as
    ``exp(-gamma_star t)``.
    """
    if not 0.0 <= theta <= math.pi:
        raise InvalidArgumentError(f"pulse area must lie in [0, pi], got {theta}")
    f = ideal_wavefunction(params, grid).values
    t = grid.points
    gs = params.gamma_star
    xi = np.outer(f, f.conj())
    if gs > 0:
        xi *= _dephasing_factor(grid, gs)
    zeta = f * np.exp(-gs * t) * np.exp(1j * alpha)
    half = 0.5 * theta
    return PhotonicState(
        p0=math.cos(half) ** 2,
        p1=math.sin(half) ** 2,
        xi=SampledKernel(grid, xi),
        zeta=SampledAmplitude(grid, zeta),
        theta=float(theta),
        alpha=float(alpha),
        params=params,
    )


# -- purities and overlaps (quadrature) --------------------------------------


def indistinguishability(s: PhotonicState) -> float:
    """``M_s``: double integral of ``|xi|^2``."""
    x = s.xi.values
    return overlap2d(s.grid, x, x)


def number_purity(s: PhotonicState) -> float:
    """``C``: integral of ``|zeta|^2``."""
    z = s.zeta.values
    return float(integrate(SampledAmplitude(s.grid, np.abs(z) ** 2)).real)


def total_purity(s: PhotonicState) -> float:
    return purity_from_parts(s.p0, s.p1, indistinguishability(s), number_purity(s))


def purity_from_parts(p0: float, p1: float, ms: float, c: float) -> float:
    """``Tr[rho^2] = p0^2 + p1^2 M_s + 2 p0 p1 C``."""
    return p0 * p0 + p1 * p1 * ms + 2.0 * p0 * p1 * c


def wavepacket_overlap(a: PhotonicState, b: PhotonicState) -> float:
    """Mean one-photon overlap ``Re double-integral xi_a xi_b^*``.

    Equal to :func:`indistinguishability` when ``a`` is ``b``; with ``b``
    emitted at a shifted frequency it is the spectrally diffused ``M_s``.
    """
    _same_grid(a.grid, b.grid)
    return overlap2d(a.grid, a.xi.values, b.xi.values)


def coherence_overlap(a: PhotonicState, b: PhotonicState) -> float:
    """``Re integral zeta_a zeta_b^*``; the spectrally diffused ``C``."""
    _same_grid(a.grid, b.grid)
    prod = a.zeta.values * b.zeta.values.conj()
    return float(integrate(SampledAmplitude(a.grid, prod.real)).real)


def fc_overlap(s: PhotonicState, c: ClassicalField) -> float:
    """``M_fc``: overlap of the one-photon density with the classical field's."""
    _same_grid(s.grid, c.grid)
    # the classical kernel beta(t) beta*(t') is rank one
    return quadratic_form2d(s.grid, s.xi.values, c.beta.values).real / c.mu_c


def fc_coherence(s: PhotonicState, c: ClassicalField) -> float:
    """``C_fc = Re integral zeta(t) beta*(t) / sqrt(mu_c)``."""
    _same_grid(s.grid, c.grid)
    prod = s.zeta.values * c.beta.values.conj()
    return float(integrate(SampledAmplitude(s.grid, prod.real)).real) / math.sqrt(c.mu_c)


def matched_classical_field(s: PhotonicState) -> ClassicalField:
    """Coherent field with the photonic intensity profile, phase locked to the drive.

    The carrier follows the nominal ``omega0``; the emission itself may be
    shifted by the state's diffusion offset.
    """
    if s.p1 <= 0.0:
        raise DegenerateStateError("a vacuum state has no intensity to match")
    t = s.grid.points
    envelope = np.sqrt(np.clip(np.real(np.diagonal(s.xi.values)), 0.0, None))
    phase = np.exp(-1j * s.params.omega0 * t + 1j * s.alpha)
    beta = SampledAmplitude(s.grid, math.sqrt(s.p1) * envelope * phase)
    mu_c = float(integrate(SampledAmplitude(s.grid, np.abs(beta.values) ** 2)).real)
    return ClassicalField(beta, mu_c)


# -- closed forms -------------------------------------------------------------


def ms_closed_form(gamma: float, gamma_star: float, delta_omega: float) -> float:
    """``gamma (gamma + 2 gamma*) / ((gamma + 2 gamma*)^2 + delta_omega^2)``."""
    _check_rates(gamma, gamma_star)
    w = gamma + 2.0 * gamma_star
    return gamma * w / (w * w + delta_omega * delta_omega)


def c_closed_form(gamma: float, gamma_star: float, delta_omega: float) -> float:
    # same Lorentzian as ms_closed_form: both quantities decay at gamma/2 + gamma*
    return ms_closed_form(gamma, gamma_star, delta_omega)


def mfc_closed_form(gamma: float, gamma_star: float, delta_omega: float) -> float:
    """Photon/classical overlap: the dephasing penalty is half the self-overlap's."""
    _check_rates(gamma, gamma_star)
    w = gamma + gamma_star
    return gamma * w / (w * w + delta_omega * delta_omega)


def average_over_diffusion(
    f: Callable[[float], float],
    dist: DiffusionDist,
    n_nodes: int = 32,
    tol: float = 1e-8,
    max_nodes: int = 1024,
) -> float:
    """Average ``f(delta_omega)`` over the diffusion distribution.

    Gaussian distributions use Gauss-Hermite quadrature starting at
    ``n_nodes`` and doubling until two successive estimates agree to ``tol``.
    Lorentzian integrands converge slowly once ``sigma`` reaches the line
    width, which is why the node count is not fixed.
    """
    if dist.kind == "delta" or dist.sigma == 0.0:
        return float(f(dist.offset))
    if n_nodes < 32:
        raise InvalidArgumentError("Gauss-Hermite averaging needs at least 32 nodes")
    f_vec = np.vectorize(f, otypes=[float])
    prev = _gauss_hermite_mean(f_vec, dist.offset, dist.sigma, n_nodes)
    n = n_nodes
    while n < max_nodes:
        n *= 2
        cur = _gauss_hermite_mean(f_vec, dist.offset, dist.sigma, n)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    return prev


def _gauss_hermite_mean(f_vec, mean, sigma, n):
    x, w = roots_hermitenorm(n)
    return float(np.dot(w, f_vec(mean + sigma * x)) / math.sqrt(2.0 * math.pi))


@lru_cache(maxsize=4)
def _dephasing_factor(grid: TimeGrid, rate: float) -> np.ndarray:
    out = np.exp(-rate * abs_time_difference(grid))
    out.setflags(write=False)
    return out


def _check_rates(gamma, gamma_star):
    if not gamma > 0:
        raise InvalidArgumentError(f"gamma must be positive, got {gamma}")
    if not gamma_star >= 0:
        raise InvalidArgumentError(f"gamma_star must be >= 0, got {gamma_star}")


def _same_grid(a: TimeGrid, b: TimeGrid):
    if not a.same_as(b):
        raise InvalidArgumentError("samples live on different time grids")
