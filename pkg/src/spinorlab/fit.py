"""Derivative-free least-squares fits of measured population traces.

Three fitters mirror the experimental analysis chain:

  fit_rabi    Rabi frequency and initial populations from a five-level
              resonant Rabi trace (closed-form rotation model with an
              incoherent mixture of initial basis states).
  fit_ramsey  gradient B1 (and initial populations) from a Ramsey trace,
              with B0, sigma_z0, T_z known.
  fit_echo    the compound dephasing parameter c = (gamma B1)^2 k_B T_z / m
              from an echo trace at tau1 = tau2.  Only c is identifiable
              from that trace; B1 or T_z is reported when the other is
              supplied.

All fits run a Nelder-Mead simplex from five jittered starts (seeded, so
deterministic) and keep the best result; ties break toward the earlier
start.  Residuals weight all m channels equally unless per-sample weights
are given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import CONSTANTS, StateVector, rad_per_s, zeeman_state
from .ensemble import (
    EnsembleSpec,
    SequenceKind,
    _damped_harmonic_curve,
    _phase_harmonics,
)
from .propagator import FieldConfig
from .rotations import rotation_population_curve

_M_STATES = (2, 1, 0, -1, -2)
_POP_KEYS = ("p_plus2_0", "p_plus1_0", "p_zero_0", "p_minus1_0", "p_minus2_0")


@dataclass(frozen=True)
class TimeSeries:
    """Sampled populations: times (s), populations (n, dim), optional weights."""

    times: np.ndarray
    populations: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.populations, dtype=float)
        if t.ndim != 1 or p.ndim != 2 or p.shape[0] != t.size:
            raise ValueError("times must be (n,) and populations (n, dim)")
        if t.size >= 2 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(p.sum(axis=1) > 1 + 1e-6):
            raise ValueError("population rows must sum to at most 1")
        w = self.weights
        if w is not None:
            w = np.asarray(w, dtype=float)
            if w.shape != (t.size,) or np.any(w < 0):
                raise ValueError("weights must be non-negative with one entry per sample")
            w = w.copy()
            w.flags.writeable = False
        for a in (t, p):
            a.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "populations", p)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class FitResult:
    params: dict
    residual_rms: float
    converged: bool
    n_evals: int
    diagnostic: str | None = None

    def __post_init__(self):
        if self.residual_rms < 0:
            raise ValueError("residual_rms must be >= 0")


class _Objective:
    """Weighted RMS between a model curve and the data, with box penalties."""

    def __init__(self, data: TimeSeries, model_fn):
        self.data = data
        self.model_fn = model_fn
        self.n_evals = 0
        if data.weights is None:
            self._w = None
        else:
            self._w = data.weights[:, None] / np.mean(data.weights)

    def __call__(self, x: np.ndarray) -> float:
        self.n_evals += 1
        model, penalty = self.model_fn(x)
        resid = model - self.data.populations
        if self._w is not None:
            resid = resid * np.sqrt(self._w)
        return float(np.sqrt(np.mean(resid**2)) + penalty)


def _multistart_minimize(objective, x0: np.ndarray, seed: int = 0, n_starts: int = 5):
    """Nelder-Mead from jittered starts; best (then earliest) result wins.

    The best objective value along each accepted simplex step is
    non-increasing; the per-start histories are kept for property tests.
    """
    rng = np.random.default_rng(seed)
    starts = [x0]
    for _ in range(n_starts - 1):
        starts.append(x0 * (1 + 0.08 * rng.standard_normal(x0.size)) + 0.01 * rng.standard_normal(x0.size))
    best = None
    histories = []
    for idx, start in enumerate(starts):
        history = []

        def track(xk, hist=history):
            hist.append(objective(np.asarray(xk, dtype=float)))

        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            callback=track,
            options={
                "maxiter": 1500,
                "xatol": 1e-9,
                "fatol": 1e-11,
                "adaptive": True,
            },
        )
        histories.append(history)
        if best is None or res.fun < best[1].fun:
            best = (idx, res)
    return best[1], histories


def _mixture_weights(x_tail: np.ndarray):
    """Map 4 free parameters to 5 populations summing to 1, with a penalty
    for leaving the simplex."""
    head = np.asarray(x_tail, dtype=float)
    last = 1.0 - head.sum()
    w = np.append(head, last)
    violation = np.sum(np.clip(-w, 0, None)) + np.sum(np.clip(w - 1, 0, None))
    return np.clip(w, 0, 1), 10.0 * violation


def _initial_guess_pops(data: TimeSeries) -> np.ndarray:
    first = np.clip(data.populations[0], 0, 1)
    s = first.sum()
    return first / s if s > 0 else np.full(5, 0.2)


def _check_degenerate(data: TimeSeries, n_evals: int = 0) -> FitResult | None:
    variation = float(np.max(np.ptp(data.populations, axis=0)))
    if variation < 1e-9:
        return FitResult(
            params={},
            residual_rms=0.0,
            converged=False,
            n_evals=n_evals,
            diagnostic="constant trace: parameters are not identifiable",
        )
    return None


def _require_enough_points(data: TimeSeries, minimum: int = 2) -> None:
    if data.n < minimum:
        raise ValueError(f"need at least {minimum} samples to fit, got {data.n}")


def _estimate_rabi_frequency(data: TimeSeries) -> float:
    """Dominant-harmonic guess: the strongest line of the m=+2 channel sits
    at Omega/2 (the cos^8 series), so Omega = 2 * 2pi * f_peak."""
    t = data.times
    y = data.populations[:, 0] - data.populations[:, 0].mean()
    spectrum = np.abs(np.fft.rfft(y * np.hanning(t.size)))
    freqs = np.fft.rfftfreq(t.size, t[1] - t[0])
    k = int(np.argmax(spectrum[1:]) + 1)
    return 2 * 2 * math.pi * freqs[k]


def rabi_model_curve(times: np.ndarray, omega: float, weights: np.ndarray) -> np.ndarray:
    """Incoherent mixture of the closed-form rotation curves."""
    theta = 0.5 * omega * np.asarray(times, dtype=float)
    out = np.zeros((times.size, 5))
    for w, m0 in zip(weights, _M_STATES):
        if w != 0:
            out += w * rotation_population_curve(m0, theta)
    return out


def fit_rabi(data: TimeSeries, initial_guess: dict | None = None, seed: int = 0) -> FitResult:
    """Fit (Omega, initial populations) to a five-level resonant Rabi trace."""
    _require_enough_points(data)
    degenerate = _check_degenerate(data)
    if degenerate is not None:
        return degenerate
    guess = dict(initial_guess or {})
    omega_guess = rad_per_s(guess.get("omega", _estimate_rabi_frequency(data)))
    if omega_guess <= 0:
        raise ValueError("omega guess must be positive")
    pops_guess = np.asarray(guess.get("p0", _initial_guess_pops(data)), dtype=float)

    def model(x):
        weights, penalty = _mixture_weights(x[1:])
        omega = abs(x[0]) * omega_guess
        return rabi_model_curve(data.times, omega, weights), penalty

    objective = _Objective(data, model)
    x0 = np.concatenate([[1.0], pops_guess[:4]])
    res, _ = _multistart_minimize(objective, x0, seed=seed)
    weights, _ = _mixture_weights(res.x[1:])
    params = {"omega": abs(res.x[0]) * omega_guess}
    params.update(zip(_POP_KEYS, weights))
    return FitResult(
        params=params,
        residual_rms=float(res.fun),
        converged=bool(res.success),
        n_evals=objective.n_evals,
    )


_basis_coeff_cache: dict = {}


def _basis_coefficients(kind: SequenceKind) -> np.ndarray:
    """Phase-harmonic coefficients of each Zeeman basis initial state,
    stacked as (initial state, harmonic, channel)."""
    if kind not in _basis_coeff_cache:
        _basis_coeff_cache[kind] = np.stack(
            [_phase_harmonics(zeeman_state(2, m), kind) for m in _M_STATES]
        )
    return _basis_coeff_cache[kind]


def _mixed_ensemble_curve(
    field: FieldConfig,
    spec: EnsembleSpec,
    kind: SequenceKind,
    tau1: np.ndarray,
    tau2: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    # an incoherent mixture mixes the harmonic coefficients linearly
    coeffs = np.tensordot(weights, _basis_coefficients(kind), axes=1)
    return _damped_harmonic_curve(field, spec, kind, tau1, tau2, coeffs)


def fit_ramsey(
    data: TimeSeries,
    known: dict,
    initial_guess: dict | None = None,
    seed: int = 0,
) -> FitResult:
    """Fit the gradient B1 and initial populations to a Ramsey trace.

    ``known`` must provide b0 (T), sigma_z0 (m), and t_axial (K); mass (kg)
    is optional and defaults to neon-20.  times are tau1.  The model is the
    analytic ensemble average, so B1 enters only through its square and the
    reported value is non-negative.
    """
    _require_enough_points(data)
    degenerate = _check_degenerate(data)
    if degenerate is not None:
        return degenerate
    b0 = float(known["b0"])
    spec = EnsembleSpec(
        sigma_z0=float(known["sigma_z0"]),
        t_axial=float(known["t_axial"]),
        mass=float(known.get("mass", CONSTANTS.mass_ne20)),
        n_samples=1,
    )
    guess = dict(initial_guess or {})
    # scale guess: 1/e time of the position-spread factor, tau_e = sqrt(2)/(gamma B1 sigma)
    tau_ref = data.times[-1] / 2
    b1_scale = float(
        guess.get("b1", math.sqrt(2.0) / (CONSTANTS.gamma * spec.sigma_z0 * tau_ref))
    )
    pops_guess = np.asarray(guess.get("p0", _initial_guess_pops(data)), dtype=float)
    zeros = np.zeros_like(data.times)

    def model(x):
        weights, penalty = _mixture_weights(x[1:])
        fld = FieldConfig(b0=b0, b1=abs(x[0]) * b1_scale)
        curve = _mixed_ensemble_curve(fld, spec, SequenceKind.RAMSEY, data.times, zeros, weights)
        return curve, penalty

    objective = _Objective(data, model)
    x0 = np.concatenate([[1.0], pops_guess[:4]])
    res, _ = _multistart_minimize(objective, x0, seed=seed)
    weights, _ = _mixture_weights(res.x[1:])
    params = {"b1": abs(res.x[0]) * b1_scale}
    params.update(zip(_POP_KEYS, weights))
    return FitResult(
        params=params,
        residual_rms=float(res.fun),
        converged=bool(res.success),
        n_evals=objective.n_evals,
    )


def fit_echo(
    data: TimeSeries,
    known: dict,
    initial_guess: dict | None = None,
    seed: int = 0,
) -> FitResult:
    """Fit the compound parameter c = (gamma B1)^2 k_B T_z / m to an echo
    trace taken at tau1 = tau2 (times are tau_tilde).

    The tau^4 envelope fixes only c; params always report "compound" (units
    s^-4) and additionally b1 when known supplies t_axial, or t_axial when
    known supplies b1.  B0 and sigma_z0 drop out at tau1 = tau2 but are
    accepted in ``known`` for interface symmetry.
    """
    _require_enough_points(data)
    degenerate = _check_degenerate(data)
    if degenerate is not None:
        return degenerate
    mass = float(known.get("mass", CONSTANTS.mass_ne20))
    have_t = "t_axial" in known
    have_b1 = "b1" in known
    if not have_t and not have_b1:
        raise ValueError("known must supply t_axial or b1 to resolve the compound parameter")

    guess = dict(initial_guess or {})
    # half-decay guess for the k=1 harmonic: c * tau^4 / 2 ~ ln 2
    tau_ref = data.times[-1] / 2 if data.times[-1] > 0 else 1.0
    c_scale = float(guess.get("compound", 2 * math.log(2) / tau_ref**4))
    pops_guess = np.asarray(guess.get("p0", _initial_guess_pops(data)), dtype=float)

    # reuse the ensemble averager by mapping c onto (B1, T_z): fix T_z and
    # solve for B1; only c = (gamma B1)^2 kB Tz / m enters at tau1 = tau2.
    t_ref = float(known.get("t_axial", 1e-3))

    def spec_field_for(c: float):
        b1 = math.sqrt(c * mass / (CONSTANTS.k_b * t_ref)) / CONSTANTS.gamma
        spec = EnsembleSpec(sigma_z0=1e-3, t_axial=t_ref, mass=mass, n_samples=1)
        return FieldConfig(b0=0.0, b1=b1), spec

    def model(x):
        weights, penalty = _mixture_weights(x[1:])
        fld, spec = spec_field_for(x[0] ** 2 * c_scale)
        curve = _mixed_ensemble_curve(
            fld, spec, SequenceKind.ECHO, data.times, data.times, weights
        )
        return curve, penalty

    objective = _Objective(data, model)
    x0 = np.concatenate([[1.0], pops_guess[:4]])
    res, _ = _multistart_minimize(objective, x0, seed=seed)
    weights, _ = _mixture_weights(res.x[1:])
    compound = res.x[0] ** 2 * c_scale
    params = {"compound": compound}
    if have_t:
        t_axial = float(known["t_axial"])
        params["b1"] = math.sqrt(compound * mass / (CONSTANTS.k_b * t_axial)) / CONSTANTS.gamma
    if have_b1:
        b1 = float(known["b1"])
        params["t_axial"] = compound * mass / (CONSTANTS.k_b * (CONSTANTS.gamma * b1) ** 2)
    params.update(zip(_POP_KEYS, weights))
    return FitResult(
        params=params,
        residual_rms=float(res.fun),
        converged=bool(res.success),
        n_evals=objective.n_evals,
    )
