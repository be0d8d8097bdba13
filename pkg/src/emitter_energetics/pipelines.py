"""Analysis chains shared by the command-line tools and the acceptance suite.

Each ``analyze_*`` function turns one kind of measurement into a plain dict
that can go straight into a JSON report.  :func:`reproduce` synthesises data
at the reference parameter sets, runs it through those chains and compares
the recovered values with the injected ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import energetics as en
from . import interferometry as hom
from . import photonic_state as ps
from . import synthlab as sl
from .timegrid import DEFAULT_POINTS, default_grid

#: Default absolute tolerance of rows recovered from synthetic noisy data.
STOCHASTIC_TOL = 0.01
DETERMINISTIC_TOL = 1e-12
QUADRATURE_TOL = 1e-5

SWEEP_POINTS = 12
TRACE_RATE = 5e4
HOM_PULSES = 1e11
HOM_RATE = 1e-2

#: Reference parameter sets: a low-temperature and a high-temperature source.
REFERENCE_SETS = {
    "5K": {"C": 0.975, "C_fc": 0.363, "M_s": 0.926, "g2": 0.0284, "M_fc": 0.489, "p1_pi": 0.95},
    "20K": {"C": 0.594, "C_fc": 0.272, "M_s": 0.580, "g2": 0.0228, "M_fc": 0.323, "p1_pi": 0.92},
}


@dataclass(frozen=True)
class ReportRow:
    quantity: str
    injected: float
    recovered: float
    tolerance: float
    kind: str

    @property
    def error(self) -> float:
        return abs(self.recovered - self.injected)

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "kind": self.kind,
            "injected": self.injected,
            "recovered": self.recovered,
            "abs_error": self.error,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ReportTable:
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dicts(self) -> list:
        return [r.as_dict() for r in self.rows]

    def format(self) -> str:
        head = f"{'quantity':<34} {'injected':>14} {'recovered':>14} {'tolerance':>10}  result"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(
                f"{r.quantity:<34} {r.injected:>14.10g} {r.recovered:>14.10g} "
                f"{r.tolerance:>10.2g}  {'PASS' if r.passed else 'FAIL'}"
            )
        return "\n".join(lines)


# -- single-measurement analyses ---------------------------------------------------


def analyze_trace(trace: sl.DetectorTrace, n_extreme: int = sl.DEFAULT_N_EXTREME,
                  g2: float | None = None, C: float | None = None, at_pi: bool = False) -> dict:
    """Visibility of a drifting-phase trace, plus what follows from it.

    ``v`` is the deconvolved maximum-likelihood value; ``v_extreme`` is the
    mean of the most extreme bins, kept for comparison.  With ``g2`` the
    visibility is read as a contaminated ``p0 C`` and corrected; with ``C``
    and ``at_pi`` it yields the inversion population.
    """
    ml = sl.deconvolve_visibility(trace)
    out = {
        "n_bins": trace.n_bins,
        "bin_width_s": trace.bin_width,
        "v": ml.v,
        "v_stderr": ml.stderr,
    }
    if trace.n_bins >= 2 * n_extreme:
        raw = sl.extract_visibility(trace, n_extreme)
        out.update(v_extreme=raw.v, v_extreme_stderr=raw.stderr, n_extreme=n_extreme)
    if g2 is not None:
        out["p0C_corrected"] = hom.corrected_p0C(ml.v, g2)
    if at_pi and C is not None:
        est = hom.p1_at_pi(ml.v, C)
        out.update(p1_pi=est.value, p1_pi_raw=est.raw, p1_pi_out_of_range=est.out_of_range)
    return out


def analyze_hom(par: sl.CoincidenceHistogram, perp: sl.CoincidenceHistogram,
                g2: float, source: str = "photonic") -> dict:
    """Overlap from co- and cross-polarised HOM histograms.

    ``photonic`` reports ``M_s`` from two copies of the emitted field;
    ``classical`` reports ``M_fc`` against a balanced coherent field, using
    the emitted field's ``g2`` in the weighted input correlation.
    """
    peaks = sl.peaks_from_histograms(par, perp)
    V = hom.v_hom(peaks)
    out = {
        "source": source,
        "g2": g2,
        "g2_hom_par": peaks.g2_hom_par,
        "g2_hom_perp": peaks.g2_hom_perp,
        "v_hom": V,
    }
    if source == "photonic":
        out["M_s"] = hom.ms_from_vhom(V, g2)
    elif source == "classical":
        gbar = hom.weighted_g2(1.0, 1.0, 1.0, g2)
        out["gbar2"] = gbar
        out["M_fc"] = hom.mfc_from_histogram(peaks.g2_hom_par, peaks.g2_hom_perp, gbar)
    else:
        raise ValueError(f"unknown HOM source {source!r}")
    return out


def analyze_sweep(thetas, v, v_err, model: str) -> sl.FitResult:
    return sl.fit_coherence(thetas, v, v_err, model)


def energy_report(C: float, C_fc: float | None = None, thetas=None) -> dict:
    """Energy breakdowns implied by fitted coherences, on ``thetas`` (default 0..pi)."""
    if thetas is None:
        thetas = np.linspace(0.0, math.pi, 9)
    C = min(max(C, 0.0), 1.0)
    out = {"qubit_to_field": [dict(theta_rad=float(t), **en.spontaneous_energy_split(t, C).as_dict())
                              for t in thetas]}
    if C_fc is not None:
        C_fc = min(max(C_fc, 0.0), 1.0)
        out["field_to_classical"] = [
            dict(theta_rad=float(t), **en.homodyne_energy_split(t, C, C_fc).as_dict()) for t in thetas
        ]
    return out


# -- synthetic sweeps -----------------------------------------------------------------


def trace_seeds(seed: int, n: int) -> list:
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(n)]


def sweep_from_traces(parameter: float, model: str, thetas, seed: int,
                      rate: float = TRACE_RATE, duration: float = sl.DEFAULT_DURATION):
    """Visibility sweep built from one simulated detector trace per pulse area."""
    thetas = np.asarray(thetas, dtype=float)
    truth = parameter * sl.fit_basis(thetas, model)
    v, err = [], []
    for vt, s in zip(truth, trace_seeds(seed, thetas.size)):
        est = sl.deconvolve_visibility(sl.simulate_trace(float(vt), rate, sl.DriftModel(seed=s), duration))
        v.append(est.v)
        err.append(est.stderr)
    return thetas, np.array(v), np.array(err)


def hom_overlap_roundtrip(M: float, g2: float, source: str, seed: int,
                          n_pulses: float = HOM_PULSES, rate: float = HOM_RATE) -> float:
    s_par, s_perp = trace_seeds(seed, 2)
    par = sl.simulate_hom_histogram(M, g2, n_pulses, rate, True, source=source, seed=s_par)
    perp = sl.simulate_hom_histogram(M, g2, n_pulses, rate, False, source=source, seed=s_perp)
    res = analyze_hom(par, perp, g2, source)
    return res["M_s"] if source == "photonic" else res["M_fc"]


def backsolved_v_pi(p1: float, C: float) -> float:
    """Self-homodyne visibility at theta = pi of a source with inversion ``p1``."""
    return (1.0 - p1) * C


def gamma_star_for(C: float, gamma: float = 1.0) -> float:
    """Pure dephasing rate that gives number purity ``C`` without diffusion."""
    return 0.5 * gamma * (1.0 / C - 1.0)


# -- reproduce ---------------------------------------------------------------------------


def reproduce(seed: int = 0, tolerance: float | None = None,
              grid_points: int = DEFAULT_POINTS, sweep_points: int | None = None) -> ReportTable:
    """Round trips at both reference parameter sets; see module docstring."""
    tol = STOCHASTIC_TOL if tolerance is None else float(tolerance)
    if sweep_points is None:
        sweep_points = SWEEP_POINTS
    thetas = np.linspace(0.0, math.pi, sweep_points)
    rows = []
    theta_grid = np.linspace(0.0, math.pi, 1001)
    for k, (label, ref) in enumerate(REFERENCE_SETS.items()):
        base = seed * 1000 + 10 * k
        C, C_fc = ref["C"], ref["C_fc"]

        # stochastic: trace -> visibility -> fit, and HOM histograms
        fit = analyze_sweep(*sweep_from_traces(C, "cos2", thetas, base + 1), "cos2")
        rows.append(ReportRow(f"C[{label}] sweep fit", C, fit.parameter, tol, "stochastic"))
        fit = analyze_sweep(*sweep_from_traces(C_fc, "cos", thetas, base + 2), "cos")
        rows.append(ReportRow(f"C_fc[{label}] sweep fit", C_fc, fit.parameter, tol, "stochastic"))
        ms = hom_overlap_roundtrip(ref["M_s"], ref["g2"], "photonic", base + 3)
        rows.append(ReportRow(f"M_s[{label}] HOM", ref["M_s"], ms, tol, "stochastic"))
        mfc = hom_overlap_roundtrip(ref["M_fc"], ref["g2"], "classical", base + 4)
        rows.append(ReportRow(f"M_fc[{label}] HOM", ref["M_fc"], mfc, tol, "stochastic"))

        # deterministic algebra
        p1 = hom.p1_at_pi(backsolved_v_pi(ref["p1_pi"], C), C).value
        rows.append(ReportRow(f"p1(pi)[{label}]", ref["p1_pi"], p1, DETERMINISTIC_TOL, "deterministic"))
        curve = en.theory_curves(theta_grid, C, C_fc, en.QUBIT_TO_FIELD)
        umax = float(curve.column("unitary").max())
        rows.append(ReportRow(f"E_unit max qubit->field[{label}]", 0.25 * C, umax,
                              DETERMINISTIC_TOL, "deterministic"))
        end = en.homodyne_energy_split(math.pi, C, C_fc)
        for name, want in (("total", 0.0), ("unitary", -0.5), ("correlation", 0.5)):
            rows.append(ReportRow(f"homodyne theta=pi {name}[{label}]", want, getattr(end, name),
                                  DETERMINISTIC_TOL, "deterministic"))
        worst = max(abs(a - b) for a, b in
                    (en.correlation_halving_check(t, C) for t in np.linspace(0.0, math.pi, 101)))
        rows.append(ReportRow(f"E_corr halving max dev[{label}]", 0.0, worst,
                              DETERMINISTIC_TOL, "deterministic"))

        # first-order coherent-noise correction at the measured g2
        s2 = 1.0 - math.sqrt(1.0 - ref["g2"])
        eta = math.asin(math.sqrt(s2))
        c1, g2 = hom.noise_model(eta, 1.0, C)
        # the correction is exact to second order in sin^2(eta)
        rows.append(ReportRow(f"noise-corrected p0C[{label}]", C, hom.corrected_p0C(c1, g2),
                              s2 * s2, "approximation"))

        # quadrature of the emitted state against closed forms
        params = ps.EmitterParams(gamma=1.0, gamma_star=gamma_star_for(C))
        state = ps.build_state(math.pi / 2, 0.0, params, default_grid(1.0, grid_points))
        gs = params.gamma_star
        for name, exact, quad in (
            ("C", ps.c_closed_form(1.0, gs, 0.0), ps.number_purity(state)),
            ("M_s", ps.ms_closed_form(1.0, gs, 0.0), ps.indistinguishability(state)),
            ("M_fc", ps.mfc_closed_form(1.0, gs, 0.0),
             ps.fc_overlap(state, ps.matched_classical_field(state))),
        ):
            rows.append(ReportRow(f"{name} quadrature[{label}]", exact, quad,
                                  QUADRATURE_TOL * abs(exact), "quadrature"))
    return ReportTable(tuple(rows))
