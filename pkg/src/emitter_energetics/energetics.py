"""Unitary/correlation split of the energy received in two transfers.

``qubit_to_field``: spontaneous emission of the driven emitter into the
empty field mode.  ``field_to_classical``: interference of the emitted field
with an intensity-matched coherent field on a balanced beam splitter, with
the coherent field as the receiver.  All energies are in units of
``hbar * omega0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .photonic_state import ClassicalField, PhotonicState
from .timegrid import SampledAmplitude, integrate

QUBIT_TO_FIELD = "qubit_to_field"
FIELD_TO_CLASSICAL = "field_to_classical"
SCENARIOS = (QUBIT_TO_FIELD, FIELD_TO_CLASSICAL)


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    unitary: float
    correlation: float
    scenario: str

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "total": self.total,
            "unitary": self.unitary,
            "correlation": self.correlation,
        }


@dataclass(frozen=True, eq=False)
class TheoryCurve:
    theta_values: np.ndarray
    breakdowns: tuple
    visibilities: np.ndarray
    scenario: str

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(b, name) for b in self.breakdowns])


def spontaneous_energy_split(theta: float, C: float) -> EnergyBreakdown:
    """Energy handed from the emitter to the field.

    The unitary part is the coherent energy ``C cos^2(theta/2) sin^2(theta/2)``
    of the emitted field; the rest is correlation energy.
    """
    _check_theta(theta)
    _check_unit_interval("C", C)
    total, unitary, correlation = spontaneous_energy_arrays(theta, C)
    return EnergyBreakdown(float(total), float(unitary), float(correlation), QUBIT_TO_FIELD)


def spontaneous_energy_arrays(theta, C):
    """Unchecked, broadcasting form of :func:`spontaneous_energy_split`."""
    c2 = np.cos(0.5 * np.asarray(theta, dtype=float)) ** 2
    s2 = np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2
    unitary = C * c2 * s2
    return s2, unitary, s2 - unitary


def unitary_energy_from_field(s: PhotonicState) -> float:
    """Integrated coherent intensity ``integral |<a(t)>|^2`` of the emitted field.

    Pure dephasing of the emitter leaves this identification intact because the
    emission spectrum stays centred on the transition.
    """
    a = s.mean_field.values
    return float(integrate(SampledAmplitude(s.grid, np.abs(a) ** 2)).real)


def homodyne_energy_split(theta: float, C: float, C_fc: float) -> EnergyBreakdown:
    """Energy received by a matched coherent field from the emitted field.

    The unitary part can be negative: at large pulse area unitary energy
    flows from the coherent field back into the photonic one.
    """
    _check_theta(theta)
    _check_unit_interval("C", C)
    _check_unit_interval("C_fc", C_fc)
    total, unitary, correlation = homodyne_energy_arrays(theta, C, C_fc)
    return EnergyBreakdown(float(total), float(unitary), float(correlation), FIELD_TO_CLASSICAL)


def homodyne_energy_arrays(theta, C, C_fc):
    """Unchecked, broadcasting form of :func:`homodyne_energy_split`.

    Each component has its own formula, so ``unitary + correlation == total``
    is a real check rather than a definition.
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(0.5 * theta)
    s2 = np.sin(0.5 * theta) ** 2
    total = c * s2 * C_fc
    unitary = s2 * (c * C_fc + 0.5 * (c * c * C - 1.0))
    correlation = 0.5 * s2 * (1.0 - c * c * C)
    return total, unitary, correlation


def homodyne_energy_split_from_fields(s: PhotonicState, c: ClassicalField) -> EnergyBreakdown:
    """Quadrature route to :func:`homodyne_energy_split`.

    The receiver is output port 3 of the beam splitter with the coherent field
    in port 1 and the photonic field in port 2.  Its energy change is read off
    the port intensities, its unitary part off the change of coherent energy.
    """
    from .interferometry import beamsplit

    a_f = s.mean_field
    out = beamsplit(c.beta, a_f, 0.0, mu1=c.mu_c, mu2=s.mean_photon_number)
    total = out.mu3 - c.mu_c
    coherent_out = float(integrate(SampledAmplitude(s.grid, np.abs(out.out3.values) ** 2)).real)
    coherent_in = float(integrate(SampledAmplitude(s.grid, np.abs(c.beta.values) ** 2)).real)
    unitary = coherent_out - coherent_in
    return EnergyBreakdown(total, unitary, total - unitary, FIELD_TO_CLASSICAL)


def correlation_halving_check(theta: float, C: float) -> tuple[float, float]:
    """``(E_corr of the homodyne transfer, half the emission correlation energy)``."""
    spont = spontaneous_energy_split(theta, C)
    # C_fc does not enter the correlation energy
    homo = homodyne_energy_split(theta, C, 0.0)
    return homo.correlation, 0.5 * spont.correlation


def transfer_efficiency(v: float) -> float:
    """Relative efficiency ``G = (1 + v) / 2`` of a matched-intensity transfer."""
    if not abs(v) <= 1.0:
        raise InvalidArgumentError(f"|v| must not exceed 1, got {v}")
    return 0.5 * (1.0 + v)


def theory_curves(theta_grid, C: float, C_fc: float, scenario: str) -> TheoryCurve:
    thetas = np.asarray(theta_grid, dtype=float)
    if thetas.ndim != 1:
        raise InvalidArgumentError("theta grid must be one-dimensional")
    if scenario == QUBIT_TO_FIELD:
        rows = tuple(spontaneous_energy_split(th, C) for th in thetas)
        vis = C * np.cos(0.5 * thetas) ** 2
    elif scenario == FIELD_TO_CLASSICAL:
        rows = tuple(homodyne_energy_split(th, C, C_fc) for th in thetas)
        vis = C_fc * np.cos(0.5 * thetas)
    else:
        raise InvalidArgumentError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    return TheoryCurve(thetas, rows, vis, scenario)


def _check_theta(theta):
    if not 0.0 <= theta <= math.pi:
        raise InvalidArgumentError(f"pulse area must lie in [0, pi], got {theta}")


def _check_unit_interval(name, x):
    if not 0.0 <= x <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {x}")
