"""Synthetic measurements and the analysis chain that reads them.

Generators draw from numpy's PCG64 stream seeded per call, so every dataset
is reproducible from ``(seed, parameters)``.  Analysis functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .errors import DegenerateFitError, InsufficientDataError, InvalidArgumentError, OutOfRangeError
from .interferometry import HomPeaks, weighted_g2

DRIFT_KINDS = ("wiener", "sinusoid", "composite")
FIT_MODELS = ("cos2", "cos")
HOM_SOURCES = ("photonic", "classical")

#: Phase diffusion of the default drift, 2 pi^2 rad^2 per minute.
DEFAULT_DIFFUSION = 2.0 * math.pi**2 / 60.0
DEFAULT_BIN_WIDTH = 0.1
DEFAULT_DURATION = 1200.0
DEFAULT_T_REP = 12.5e-9
DEFAULT_N_EXTREME = 100
DEFAULT_SIDE_PEAK_FACTOR = 0.75


@dataclass(frozen=True)
class DriftModel:
    """Free evolution of the interferometer phase.

    ``composite`` superposes Wiener diffusion on a slow sinusoid; the defaults
    sweep the whole phase circle within a 20 minute run.
    """

    kind: str = "composite"
    diffusion: float = DEFAULT_DIFFUSION
    amplitude: float = math.pi
    period: float = 600.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in DRIFT_KINDS:
            raise InvalidArgumentError(f"unknown drift kind {self.kind!r}")
        if self.diffusion < 0:
            raise InvalidArgumentError("phase diffusion must be >= 0")
        if self.kind != "wiener" and not self.period > 0:
            raise InvalidArgumentError("sinusoidal drift needs a positive period")

    def phases(self, n_bins: int, bin_width: float) -> np.ndarray:
        """Phase at the start of each bin."""
        phase_rng, _ = _streams(self.seed)
        t = np.arange(n_bins) * bin_width
        phi = np.zeros(n_bins)
        if self.kind in ("wiener", "composite") and self.diffusion > 0 and n_bins > 1:
            steps = phase_rng.normal(0.0, math.sqrt(self.diffusion * bin_width), n_bins - 1)
            phi[1:] = np.cumsum(steps)
        if self.kind in ("sinusoid", "composite"):
            phi += self.amplitude * np.sin(2.0 * math.pi * t / self.period)
        return phi


@dataclass(frozen=True, eq=False)
class DetectorTrace:
    bin_width: float
    counts1: np.ndarray = field(repr=False)
    counts2: np.ndarray = field(repr=False)
    duration: float

    def __post_init__(self):
        c1 = np.asarray(self.counts1, dtype=np.int64)
        c2 = np.asarray(self.counts2, dtype=np.int64)
        if c1.shape != c2.shape or c1.ndim != 1:
            raise InvalidArgumentError("detector count arrays must be 1-D and equally long")
        if (c1 < 0).any() or (c2 < 0).any():
            raise InvalidArgumentError("counts must be non-negative")
        if not self.bin_width > 0:
            raise InvalidArgumentError("bin width must be positive")
        if c1.size != n_bins_for(self.duration, self.bin_width):
            raise InvalidArgumentError(
                f"{c1.size} bins do not match duration {self.duration} s at {self.bin_width} s"
            )
        object.__setattr__(self, "counts1", c1)
        object.__setattr__(self, "counts2", c2)

    @property
    def n_bins(self) -> int:
        return self.counts1.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.bin_width

    def swapped(self) -> "DetectorTrace":
        return DetectorTrace(self.bin_width, self.counts2, self.counts1, self.duration)


@dataclass(frozen=True, eq=False)
class CoincidenceHistogram:
    peak_delays: np.ndarray
    areas: np.ndarray
    t_rep: float = DEFAULT_T_REP

    def __post_init__(self):
        d = np.asarray(self.peak_delays, dtype=np.int64)
        a = np.asarray(self.areas, dtype=float)
        if d.shape != a.shape or d.ndim != 1:
            raise InvalidArgumentError("delays and areas must be 1-D and equally long")
        if (a < 0).any():
            raise InvalidArgumentError("peak areas must be non-negative")
        if 0 not in d:
            raise InvalidArgumentError("histogram lacks the zero-delay peak")
        object.__setattr__(self, "peak_delays", d)
        object.__setattr__(self, "areas", a)

    def area_at(self, delay: int) -> float:
        return float(self.areas[self.peak_delays == delay].sum())

    def mean_area(self, min_abs_delay: int) -> float:
        sel = np.abs(self.peak_delays) >= min_abs_delay
        if not sel.any():
            return 0.0
        return float(self.areas[sel].mean())


@dataclass(frozen=True, eq=False)
class VisibilityEstimate:
    v: float
    stderr: float
    histogram: np.ndarray = field(repr=False)
    n_extreme: int
    method: str = "extreme"


@dataclass(frozen=True)
class FitResult:
    parameter: float
    stderr: float
    residual_norm: float
    model: str

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "parameter": self.parameter,
            "stderr": self.stderr,
            "residual_norm": self.residual_norm,
        }


def n_bins_for(duration: float, bin_width: float) -> int:
    # tolerate representation error in duration / bin_width
    return int(math.floor(duration / bin_width + 1e-9))


def _streams(seed: int):
    phase_seq, count_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(phase_seq), np.random.default_rng(count_seq)


# -- detector traces ----------------------------------------------------------


def simulate_trace(v_true: float, mean_rate: float, drift: DriftModel,
                   duration: float = DEFAULT_DURATION, bin_width: float = DEFAULT_BIN_WIDTH,
                   noise: bool = True) -> DetectorTrace:
    """Counts at the two beam-splitter outputs while the phase drifts.

    Detector 1 sees rate ``R (1 + v cos phi) / 2``, detector 2 the complement.
    With ``noise=False`` the expected counts are rounded instead of sampled.
    """
    if not abs(v_true) <= 1.0:
        raise InvalidArgumentError(f"|v_true| must not exceed 1, got {v_true}")
    if not mean_rate > 0:
        raise InvalidArgumentError(f"mean rate must be positive, got {mean_rate}")
    if not (duration > 0 and bin_width > 0):
        raise InvalidArgumentError("duration and bin width must be positive")
    n = n_bins_for(duration, bin_width)
    if n < 1:
        raise InvalidArgumentError("duration is shorter than one bin")
    phi = drift.phases(n, bin_width)
    mean = mean_rate * bin_width
    lam1 = 0.5 * mean * (1.0 + v_true * np.cos(phi))
    lam2 = 0.5 * mean * (1.0 - v_true * np.cos(phi))
    if noise:
        _, count_rng = _streams(drift.seed)
        c1 = count_rng.poisson(lam1)
        c2 = count_rng.poisson(lam2)
    else:
        c1 = np.rint(lam1).astype(np.int64)
        c2 = np.rint(lam2).astype(np.int64)
    return DetectorTrace(bin_width, c1, c2, duration)


def bin_visibility(trace: DetectorTrace) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin visibilities and total counts, skipping empty bins."""
    tot = trace.counts1 + trace.counts2
    keep = tot > 0
    c1 = trace.counts1[keep].astype(float)
    c2 = trace.counts2[keep].astype(float)
    n = tot[keep].astype(float)
    return (c1 - c2) / n, n


def extract_visibility(trace: DetectorTrace, n_extreme: int = DEFAULT_N_EXTREME) -> VisibilityEstimate:
    """Maximum fringe visibility from the ``n_extreme`` highest and lowest bins.

    The estimate is the mean absolute value of those ``2 n_extreme`` per-bin
    visibilities.  Counting noise biases it upward by roughly two per-bin
    standard deviations; see :func:`deconvolve_visibility` for an unbiased
    alternative.
    """
    if n_extreme < 1:
        raise InvalidArgumentError("n_extreme must be >= 1")
    v, n = bin_visibility(trace)
    if v.size < 2 * n_extreme:
        raise InsufficientDataError(
            f"{v.size} usable bins; need at least {2 * n_extreme} for n_extreme={n_extreme}"
        )
    order = np.argsort(v, kind="stable")
    picked = np.concatenate([order[:n_extreme], order[-n_extreme:]])
    vals = v[picked]
    est = float(np.mean(np.abs(vals)))
    # binomial counting error of each picked bin, (1 - v^2) / n
    var = np.clip(1.0 - vals**2, 0.0, None) / n[picked]
    stderr = float(math.sqrt(var.sum()) / picked.size)
    return VisibilityEstimate(est, stderr, v, n_extreme, "extreme")


def deconvolve_visibility(trace: DetectorTrace, n_phase_nodes: int = 128) -> VisibilityEstimate:
    """Maximum-likelihood fringe visibility with counting noise deconvolved.

    Each bin is modelled as ``v cos(phi) + noise`` with the phase uniform on the
    circle and Gaussian counting noise of variance ``(1 - v^2 cos^2 phi) / n``.
    Only the edges of the per-bin distribution carry the visibility, so the
    estimate tolerates a phase walk that covers the circle unevenly.
    """
    v, n = bin_visibility(trace)
    if v.size < 2:
        raise InsufficientDataError("need at least two non-empty bins")
    cos_nodes = np.cos((np.arange(n_phase_nodes) + 0.5) * math.pi / n_phase_nodes)
    log_nodes = math.log(n_phase_nodes)

    def nll(amp):
        s = amp * cos_nodes[None, :]
        var = np.clip(1.0 - s * s, 1e-12, None) / n[:, None]
        ll = -0.5 * (v[:, None] - s) ** 2 / var - 0.5 * np.log(2.0 * math.pi * var)
        return -float(np.sum(logsumexp(ll, axis=1) - log_nodes))

    upper = 1.0 - 1e-6
    res = minimize_scalar(nll, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-7})
    amp = float(res.x)
    # observed information from a central second difference
    h = 1e-4
    lo, hi = max(0.0, amp - h), min(upper, amp + h)
    mid = 0.5 * (lo + hi)
    step = 0.5 * (hi - lo)
    curv = (nll(hi) - 2.0 * nll(mid) + nll(lo)) / (step * step)
    if curv > 0:
        stderr = 1.0 / math.sqrt(curv)
    else:
        # flat likelihood: fall back to the Fisher information at v = 0
        stderr = 1.0 / math.sqrt(0.5 * n.sum())
    return VisibilityEstimate(amp, stderr, v, int(v.size), "deconvolved")


# -- HOM coincidence histograms -----------------------------------------------


def hom_peak_weights(M: float, g2: float, copolarized: bool, source: str = "photonic",
                     side_peak_factor: float = DEFAULT_SIDE_PEAK_FACTOR) -> tuple[float, float]:
    """Expected (central, first side) peak areas relative to an uncorrelated peak.

    ``photonic``: two copies of the emitted field; ``M`` is the one-photon
    indistinguishability, and a small ``g2`` lowers the pair overlap to
    ``M (1 - g2)``.  ``classical``: emitted field against a balanced coherent
    field; ``M`` is their overlap and the correlation term is the weighted
    average of ``g2`` and the coherent field's unit value.
    """
    if source == "photonic":
        overlap = M * (1.0 - g2)
        gbar = g2
    elif source == "classical":
        overlap = M
        gbar = weighted_g2(1.0, 1.0, 1.0, g2)
    else:
        raise InvalidArgumentError(f"unknown HOM source {source!r}")
    if copolarized:
        return 0.5 * (1.0 - overlap + gbar), side_peak_factor
    return 0.5 * (1.0 + gbar), 1.0


def simulate_hom_histogram(M: float, g2: float, n_pulses: float, rate_per_pulse: float,
                           copolarized: bool, side_peak_factor: float = DEFAULT_SIDE_PEAK_FACTOR,
                           *, source: str = "photonic", seed: int = 0, n_side: int = 10,
                           t_rep: float = DEFAULT_T_REP) -> CoincidenceHistogram:
    """Poisson-sampled HOM peak areas at delays ``-n_side .. n_side`` pulse periods.

    ``rate_per_pulse`` is the probability per pulse of a coincidence landing in
    one uncorrelated peak.
    """
    if not 0.0 <= M <= 1.0:
        raise InvalidArgumentError(f"M must lie in [0, 1], got {M}")
    if not g2 >= 0:
        raise InvalidArgumentError(f"g2 must be >= 0, got {g2}")
    if not (n_pulses > 0 and rate_per_pulse > 0):
        raise InvalidArgumentError("n_pulses and rate_per_pulse must be positive")
    if not 0.0 < side_peak_factor <= 1.0:
        raise InvalidArgumentError("side_peak_factor must lie in (0, 1]")
    if n_side < 2:
        raise InvalidArgumentError("need at least two side peaks on each side")
    central, side = hom_peak_weights(M, g2, copolarized, source, side_peak_factor)
    delays = np.arange(-n_side, n_side + 1)
    weights = np.ones(delays.size)
    weights[delays == 0] = central
    weights[np.abs(delays) == 1] = side
    expected = n_pulses * rate_per_pulse * weights
    rng = np.random.default_rng(seed)
    return CoincidenceHistogram(delays, rng.poisson(expected).astype(float), t_rep)


def peaks_from_histograms(par: CoincidenceHistogram, perp: CoincidenceHistogram) -> HomPeaks:
    """Reduce co- and cross-polarised histograms to normalisation-ready areas."""
    return HomPeaks(
        central_par=par.area_at(0),
        central_perp=perp.area_at(0),
        side_first_par=0.5 * (par.area_at(1) + par.area_at(-1)),
        uncorrelated_par=par.mean_area(2),
        uncorrelated_perp=perp.mean_area(1),
    )


# -- fits -----------------------------------------------------------------------


def fit_basis(theta_values, model: str) -> np.ndarray:
    th = np.asarray(theta_values, dtype=float)
    if model == "cos2":
        return np.cos(0.5 * th) ** 2
    if model == "cos":
        return np.cos(0.5 * th)
    raise InvalidArgumentError(f"unknown fit model {model!r}; expected one of {FIT_MODELS}")


def fit_coherence(theta_values, v_values, v_errors, model: str) -> FitResult:
    """Weighted least squares for ``v = P * basis(theta)``.

    Both models are linear in ``P``, so the normal equation is solved in
    closed form and ``stderr = 1 / sqrt(sum(basis^2 / sigma^2))``.
    """
    b = fit_basis(theta_values, model)
    v = np.asarray(v_values, dtype=float)
    err = np.asarray(v_errors, dtype=float)
    if not (b.shape == v.shape == err.shape) or b.ndim != 1:
        raise InvalidArgumentError("theta, v and error arrays must be 1-D and equally long")
    if b.size < 2:
        raise InvalidArgumentError("need at least two points to fit")
    if not (err > 0).all():
        raise InvalidArgumentError("all errors must be positive")
    w = 1.0 / err**2
    # cos(pi/2) is ~6e-17, not 0
    if np.all(np.abs(b) < 1e-12):
        raise DegenerateFitError("fit basis vanishes at every pulse area")
    info = float(np.sum(w * b * b))
    p = float(np.sum(w * b * v) / info)
    resid = v - p * b
    return FitResult(p, 1.0 / math.sqrt(info), float(math.sqrt(np.sum(w * resid**2))), model)


def rabi_mapping(power: float, p_pi: float) -> tuple[float, float]:
    """Pulse area ``2 arcsin(sqrt(P / P_pi))`` and emitted intensity ``sin^2(theta/2)``."""
    if not p_pi > 0:
        raise InvalidArgumentError(f"P_pi must be positive, got {p_pi}")
    if power < 0:
        raise InvalidArgumentError(f"power must be >= 0, got {power}")
    if power > p_pi:
        raise OutOfRangeError("powers beyond the first Rabi maximum are not modelled")
    ratio = power / p_pi
    theta = 2.0 * math.asin(math.sqrt(ratio))
    return theta, ratio


def simulate_sweep(parameter: float, model: str, thetas, sigma: float, seed: int) -> np.ndarray:
    """Visibilities ``parameter * basis(theta)`` plus Gaussian noise of width ``sigma``."""
    b = fit_basis(thetas, model)
    rng = np.random.default_rng(seed)
    return parameter * b + rng.normal(0.0, sigma, b.size)
