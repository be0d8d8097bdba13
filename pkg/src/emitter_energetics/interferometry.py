"""Balanced beam splitter, interference visibilities and HOM estimators.

Mean-field amplitudes carry only the coherent part of each input; whatever
intensity an input has beyond its coherent part is split evenly between the
two outputs.  That bookkeeping is enough for every visibility below without
a two-mode density-matrix engine.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    DegenerateHistogramError,
    DegenerateInputError,
    DegenerateStateError,
    InvalidArgumentError,
    UnmatchedIntensityError,
)
from .photonic_state import ClassicalField, PhotonicState
from .timegrid import SampledAmplitude, SampledKernel, integrate, overlap2d

log = logging.getLogger(__name__)

Field = Union[PhotonicState, ClassicalField]

#: Largest tolerated mismatch between classical and photonic mean photon numbers.
INTENSITY_MATCH_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class BeamSplitterOutputs:
    out3: SampledAmplitude
    out4: SampledAmplitude
    mu3: float
    mu4: float


@dataclass(frozen=True)
class HomPeaks:
    """Integrated HOM coincidence peaks in both polarisation configurations."""

    central_par: float
    central_perp: float
    side_first_par: float
    uncorrelated_par: float
    uncorrelated_perp: float

    def __post_init__(self):
        for name in ("central_par", "central_perp", "side_first_par",
                     "uncorrelated_par", "uncorrelated_perp"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")

    @property
    def g2_hom_par(self) -> float:
        if self.uncorrelated_par <= 0:
            raise DegenerateHistogramError("co-polarised histogram has no uncorrelated peaks")
        return self.central_par / self.uncorrelated_par

    @property
    def g2_hom_perp(self) -> float:
        if self.uncorrelated_perp <= 0:
            raise DegenerateHistogramError("cross-polarised histogram has no uncorrelated peaks")
        return self.central_perp / self.uncorrelated_perp


class PopulationEstimate(NamedTuple):
    value: float
    raw: float
    out_of_range: bool


def beamsplit(a1: SampledAmplitude, a2: SampledAmplitude, phi: float,
              mu1: float | None = None, mu2: float | None = None) -> BeamSplitterOutputs:
    """Mix two mean fields on a balanced beam splitter with relative phase ``phi``.

    ``mu1`` and ``mu2`` are the full input photon numbers; when omitted the
    input is taken as fully coherent.  Port 4 uses ``-exp(-i phi)`` so that
    the transformation is unitary and photon number is conserved.
    """
    if not a1.grid.same_as(a2.grid):
        raise InvalidArgumentError("beam splitter inputs live on different grids")
    grid = a1.grid
    coh1 = _power(a1)
    coh2 = _power(a2)
    mu1 = coh1 if mu1 is None else float(mu1)
    mu2 = coh2 if mu2 is None else float(mu2)
    inc1 = mu1 - coh1
    inc2 = mu2 - coh2
    if inc1 < -1e-9 or inc2 < -1e-9:
        raise InvalidArgumentError("an input carries more coherent than total intensity")
    ph = np.exp(1j * phi)
    out3 = SampledAmplitude(grid, (a1.values + ph * a2.values) / math.sqrt(2.0))
    out4 = SampledAmplitude(grid, (-np.conj(ph) * a1.values + a2.values) / math.sqrt(2.0))
    incoherent = 0.5 * (inc1 + inc2)
    return BeamSplitterOutputs(out3, out4, _power(out3) + incoherent, _power(out4) + incoherent)


def visibility(mu3: float, mu4: float) -> float:
    den = mu3 + mu4
    if den <= 0:
        raise DegenerateInputError("no light at the beam splitter outputs")
    return (mu3 - mu4) / den


def self_homodyne_visibility(s: PhotonicState, phi: float) -> float:
    """Visibility of two identical copies of ``s`` interfering with phase ``phi``.

    Reads out ``cos(phi) p0 C``: the fraction of the emitted energy that is
    coherent, i.e. unitary.
    """
    if s.p1 <= 0:
        raise DegenerateStateError("self-homodyne visibility is undefined for vacuum")
    mu = s.mean_photon_number
    a = s.mean_field
    out = beamsplit(a, a, phi, mu1=mu, mu2=mu)
    return visibility(out.mu3, out.mu4)


def homodyne_visibility(s: PhotonicState, c: ClassicalField) -> float:
    """Visibility of ``s`` against an intensity-matched coherent field."""
    mu_f = s.mean_photon_number
    if abs(c.mu_c - mu_f) >= INTENSITY_MATCH_TOL:
        raise UnmatchedIntensityError(
            f"classical field carries {c.mu_c:.6g} photons, photonic field {mu_f:.6g}"
        )
    out = beamsplit(c.beta, s.mean_field, 0.0, mu1=c.mu_c, mu2=mu_f)
    return visibility(out.mu3, out.mu4)


def hom_central_correlation(a: Field, b: Field, copolarized: bool = True,
                            g2_a: float | None = None, g2_b: float | None = None) -> float:
    """Central-peak area of the phase-averaged HOM coincidences between ``a`` and ``b``.

    Area is ``[mu_a^2 g2_a + mu_b^2 g2_b + 2 mu_a mu_b (1 - M_ab)] / 4`` where
    ``M_ab`` is the overlap of the first-order correlation functions; the
    overlap term is dropped for crossed polarisations.  ``g2`` defaults to
    the input's own value (0 for the truncated photonic state, 1 for a
    coherent field).
    """
    mu_a, mu_b = a.mean_photon_number, b.mean_photon_number
    g2_a = a.g2 if g2_a is None else g2_a
    g2_b = b.g2 if g2_b is None else g2_b
    area = mu_a * mu_a * g2_a + mu_b * mu_b * g2_b + 2.0 * mu_a * mu_b
    if copolarized:
        ka, kb = _first_order(a), _first_order(b)
        if not ka.grid.same_as(kb.grid):
            raise InvalidArgumentError("HOM inputs live on different grids")
        area -= 2.0 * overlap2d(ka.grid, ka.values, kb.values)
    return 0.25 * area


def hom_uncorrelated_area(a: Field, b: Field) -> float:
    """Area of a peak built from independent pulses, ``(mu_a + mu_b)^2 / 4``."""
    return 0.25 * (a.mean_photon_number + b.mean_photon_number) ** 2


def v_hom(peaks: HomPeaks) -> float:
    """HOM visibility from normalised central peaks.

    The co-polarised normalisation skips the first side peak, which the
    interferometer delay partially suppresses.
    """
    g_perp = peaks.g2_hom_perp
    g_par = peaks.g2_hom_par
    if g_perp <= 0:
        raise DegenerateHistogramError("cross-polarised central peak is empty")
    return (g_perp - g_par) / g_perp


def ms_from_vhom(V: float, g2: float) -> float:
    """Single-photon indistinguishability ``V (1 + g2) / (1 - g2)``."""
    if not 0.0 <= g2 < 1.0:
        raise InvalidArgumentError(f"g2 must lie in [0, 1), got {g2}")
    return V * (1.0 + g2) / (1.0 - g2)


def mfc_from_histogram(g2_par: float, g2_perp: float, gbar2: float) -> float:
    """Photon/coherent-field overlap from normalised HOM central peaks."""
    if g2_perp <= 0:
        raise DegenerateHistogramError("cross-polarised normalised peak must be positive")
    return (g2_perp - g2_par) / g2_perp * (1.0 + gbar2)


def weighted_g2(mu_c: float, mu_f: float, g2_c: float, g2_f: float) -> float:
    """Intensity-weighted average input correlation of a two-input HOM experiment."""
    if not (mu_c > 0 and mu_f > 0):
        raise InvalidArgumentError("both inputs need a positive mean photon number")
    return 0.5 * (mu_c / mu_f) * g2_c + 0.5 * (mu_f / mu_c) * g2_f


def noise_model(eta: float, p0: float, C: float) -> tuple[float, float]:
    """First-order coherence and ``g2`` after mixing in coherent noise of weight ``eta``."""
    if not 0.0 <= eta <= 0.5 * math.pi:
        raise InvalidArgumentError(f"eta must lie in [0, pi/2], got {eta}")
    c2 = math.cos(eta) ** 2
    s2 = math.sin(eta) ** 2
    return p0 * C * c2 + s2, 2.0 * c2 * s2 + s2 * s2


def corrected_p0C(c1: float, g2: float) -> float:
    """Lowest-order removal of coherent-noise contamination from ``c1``."""
    if not g2 < 2.0:
        raise InvalidArgumentError(f"g2 must be below 2, got {g2}")
    return (c1 - 0.5 * g2) / (1.0 - 0.5 * g2)


def p1_at_pi(v_pi: float, C: float) -> PopulationEstimate:
    """Excited-state population after a pi pulse, ``1 - v(pi) / C``.

    Counting noise can push the raw estimate outside [0, 1]; it is then
    clamped and flagged instead of rejected.
    """
    if C == 0:
        raise InvalidArgumentError("C must be non-zero")
    raw = 1.0 - v_pi / C
    clamped = min(1.0, max(0.0, raw))
    out = clamped != raw
    if out:
        log.warning("p1(pi) estimate %.4g lies outside [0, 1]; reporting %.4g", raw, clamped)
    return PopulationEstimate(clamped, raw, out)


def _power(a: SampledAmplitude) -> float:
    return float(integrate(SampledAmplitude(a.grid, np.abs(a.values) ** 2)).real)


def _first_order(x: Field) -> SampledKernel:
    # G1(t, t') = <a^dagger(t') a(t)>
    if isinstance(x, PhotonicState):
        return SampledKernel(x.grid, x.p1 * x.xi.values)
    beta = x.beta.values
    return SampledKernel(x.grid, np.outer(beta, beta.conj()))
