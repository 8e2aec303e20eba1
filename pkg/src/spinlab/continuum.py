"""Discretized wave equation on a 1D lattice and Landau free-energy minimization.

The lattice field ``q_alpha(t)`` obeys
``q'' + (2 q_alpha - q_{alpha+1} - q_{alpha-1}) / a**2 = 0`` with unit wave
speed, so plane waves satisfy ``omega = (2/a) |sin(k a / 2)|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import least_squares

from .errors import ParameterError, StabilityError

#: Largest accepted time step in units of the lattice spacing.
MAX_DT_OVER_A = 0.1

WAVE_HEADER = ("k", "omega_analytic", "omega_measured", "rel_error")


@dataclass(frozen=True)
class LatticeWaveParams:
    a: float = 1.0
    N: int = 64
    boundary: Literal["periodic", "infinite-analytic"] = "periodic"

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ParameterError("lattice spacing must be positive", a=self.a)
        if self.boundary not in ("periodic", "infinite-analytic"):
            raise ParameterError(f"unknown boundary {self.boundary!r}", boundary=self.boundary)
        if self.boundary == "periodic" and self.N < 2:
            raise ParameterError("periodic lattice needs N >= 2", N=self.N)


@dataclass(frozen=True)
class LandauParams:
    tau: float
    tau_c: float = 0.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ParameterError("quartic coefficient must be positive", lam=self.lam)
        if not (math.isfinite(self.tau) and math.isfinite(self.tau_c) and math.isfinite(self.lam)):
            raise ParameterError("Landau parameters must be finite")


def discrete_dispersion(k: float, a: float = 1.0) -> float:
    if not a > 0:
        raise ParameterError("lattice spacing must be positive", a=a)
    return abs(2.0 / a * math.sin(k * a / 2.0))


def allowed_momenta(N: int, a: float = 1.0) -> np.ndarray:
    """``2 pi m / (N a)`` for the ``N`` integers ``m`` with ``k`` in ``(-pi/a, pi/a]``."""
    if N < 2:
        raise ParameterError("need N >= 2", N=N)
    if not a > 0:
        raise ParameterError("lattice spacing must be positive", a=a)
    m = np.arange(-((N + 1) // 2) + 1, N // 2 + 1)
    return 2.0 * np.pi * m / (N * a)


def _laplacian(q: np.ndarray, a: float) -> np.ndarray:
    return (np.roll(q, 1) + np.roll(q, -1) - 2.0 * q) / (a * a)


def lattice_energy(q: np.ndarray, v: np.ndarray, a: float) -> float:
    """``sum(v**2 / 2 + (q_{alpha+1} - q_alpha)**2 / (2 a**2))``."""
    dq = np.roll(q, -1) - q
    return float(0.5 * np.sum(v * v) + 0.5 * np.sum(dq * dq) / (a * a))


def _check_momentum(p: LatticeWaveParams, k: float) -> int:
    if p.boundary != "periodic":
        raise ParameterError("integration needs a periodic lattice")
    m_float = k * p.N * p.a / (2.0 * math.pi)
    m = round(m_float)
    if abs(m_float - m) > 1e-9 or not -p.N / 2 < m <= p.N / 2:
        raise ParameterError("k is not an allowed lattice momentum", k=k, N=p.N, a=p.a)
    return m


def _check_dt(p: LatticeWaveParams, dt: float) -> None:
    if not dt > 0:
        raise ParameterError("time step must be positive", dt=dt)
    if dt > MAX_DT_OVER_A * p.a:
        raise StabilityError(
            f"dt must not exceed {MAX_DT_OVER_A} a", dt=dt, a=p.a, limit=MAX_DT_OVER_A * p.a
        )


def leapfrog(q: np.ndarray, v: np.ndarray, a: float, dt: float, n_steps: int, record_site: int | None = 0):
    """Velocity-Verlet (kick-drift-kick) steps.

    Returns the final ``(q, v)`` and the trace of ``q[record_site]`` at every
    step including t = 0.
    """
    q = np.array(q, dtype=float)
    v = np.array(v, dtype=float)
    trace = np.empty(n_steps + 1)
    trace[0] = q[record_site]
    acc = _laplacian(q, a)
    for i in range(n_steps):
        v += 0.5 * dt * acc
        q += dt * v
        acc = _laplacian(q, a)
        v += 0.5 * dt * acc
        trace[i + 1] = q[record_site]
    return q, v, trace


def standing_wave(p: LatticeWaveParams, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Real plane wave ``q_alpha = cos(k a alpha)`` released from rest."""
    alpha = np.arange(p.N)
    return np.cos(k * p.a * alpha), np.zeros(p.N)


def fit_frequency(t: np.ndarray, y: np.ndarray) -> float:
    """Frequency of a sampled sinusoid.

    Zero crossings give a seed; a least-squares fit of
    ``A cos(w t) + B sin(w t) + c`` over a whole number of seed periods refines it.
    """
    y = np.asarray(y, dtype=float)
    scale = float(np.max(np.abs(y - y.mean()))) if y.size else 0.0
    if scale <= 1e-12 * max(float(np.max(np.abs(y))), 1.0):
        return 0.0
    centered = y - y.mean()
    sign = np.signbit(centered)
    idx = np.nonzero(sign[1:] != sign[:-1])[0]
    if len(idx) < 3:
        raise ParameterError("run too short to resolve a period", crossings=int(len(idx)))
    # Linear interpolation of each crossing instant.
    t0 = t[idx] - centered[idx] * (t[idx + 1] - t[idx]) / (centered[idx + 1] - centered[idx])
    half_periods = len(t0) - 1
    w_seed = math.pi * half_periods / (t0[-1] - t0[0])
    period = 2.0 * math.pi / w_seed
    n_periods = max(1, int((t[-1] - t[0]) / period))
    window = t <= t[0] + n_periods * period + 1e-12
    tw, yw = t[window], y[window]

    def resid(params):
        w, A, B, c = params
        return A * np.cos(w * tw) + B * np.sin(w * tw) + c - yw

    A0 = float(yw[0] - yw.mean())
    sol = least_squares(resid, x0=[w_seed, A0, 0.0, float(yw.mean())], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return abs(float(sol.x[0]))


def integrate_lattice_wave(
    p: LatticeWaveParams, k: float, t_final: float | None = None, dt: float | None = None
) -> float:
    """Measured angular frequency of a standing wave at momentum ``k``.

    Defaults: ``dt = 0.01 a`` and ``t_final`` covering four periods.
    """
    m = _check_momentum(p, k)
    dt = 0.01 * p.a if dt is None else dt
    _check_dt(p, dt)
    omega = discrete_dispersion(k, p.a)
    if t_final is None:
        t_final = 4 * 2 * math.pi / omega if omega > 0 else 100 * dt
    n_steps = int(round(t_final / dt))
    q0, v0 = standing_wave(p, k)
    if m == 0:
        return 0.0 if np.allclose(leapfrog(q0, v0, p.a, dt, n_steps)[2], q0[0], atol=1e-12) else math.nan
    _, _, trace = leapfrog(q0, v0, p.a, dt, n_steps)
    t = dt * np.arange(n_steps + 1)
    return fit_frequency(t, trace)


def energy_drift(p: LatticeWaveParams, k: float, dt: float, n_steps: int) -> float:
    """Max relative deviation of the lattice energy along a leapfrog run."""
    _check_momentum(p, k)
    _check_dt(p, dt)
    q, v = standing_wave(p, k)
    e0 = lattice_energy(q, v, p.a)
    worst = 0.0
    acc = _laplacian(q, p.a)
    for _ in range(n_steps):
        v += 0.5 * dt * acc
        q += dt * v
        acc = _laplacian(q, p.a)
        v += 0.5 * dt * acc
        worst = max(worst, abs(lattice_energy(q, v, p.a) - e0))
    return worst / e0


def dispersion_rows(p: LatticeWaveParams, momenta=None, dt: float | None = None) -> list[tuple]:
    """``(k, omega_analytic, omega_measured, rel_error)`` per momentum."""
    ks = allowed_momenta(p.N, p.a) if momenta is None else momenta
    rows = []
    for k in ks:
        w_an = discrete_dispersion(float(k), p.a)
        w_me = integrate_lattice_wave(p, float(k), dt=dt)
        rel = abs(w_me - w_an) / w_an if w_an > 0 else abs(w_me)
        rows.append((float(k), w_an, w_me, rel))
    return rows


def free_energy(phi: float, p: LandauParams) -> float:
    return (p.tau - p.tau_c) * phi**2 + p.lam * phi**4


def landau_closed_form(p: LandauParams) -> float:
    """``sqrt((tau_c - tau) / lam)`` below ``tau_c``, else 0."""
    return math.sqrt((p.tau_c - p.tau) / p.lam) if p.tau < p.tau_c else 0.0


def landau_stationary_point(p: LandauParams) -> float:
    """Exact minimizer of ``F`` on ``phi >= 0``: ``sqrt((tau_c - tau) / (2 lam))``."""
    return math.sqrt((p.tau_c - p.tau) / (2.0 * p.lam)) if p.tau < p.tau_c else 0.0


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def landau_equilibrium(p: LandauParams, tol: float = 1e-14) -> float:
    """Numerical minimizer of ``F`` over ``phi >= 0``.

    Expand a bracket until ``F`` rises, narrow it by golden-section search,
    then polish with Newton steps on ``F'``.
    """
    r = p.tau - p.tau_c
    if r >= 0:
        # F is non-decreasing on phi >= 0, so the edge is the minimum.
        return 0.0
    f = lambda x: free_energy(x, p)  # noqa: E731
    hi = 1.0
    while f(hi) <= f(hi / 2):
        hi *= 2.0
    lo = 0.0
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(200):
        if hi - lo <= 1e-6 * hi:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    for _ in range(50):
        grad = 2.0 * r * x + 4.0 * p.lam * x**3
        curv = 2.0 * r + 12.0 * p.lam * x**2
        step = grad / curv
        x -= step
        if abs(step) <= tol * max(x, 1.0):
            break
    return x
