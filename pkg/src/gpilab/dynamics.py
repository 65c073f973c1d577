"""Time evolution of the shifted Gross-Pitaevskii equation.

The unknown u solves

    i du/dt - Lap u + (1+u)(|u|^2 + 2 Re u) = 0,

integrated by Strang splitting: exact spectral half-step for the linear
part, one classical RK4 update for the pointwise ODE u' = i F(u), with
2/3-rule dealiasing after the nonlinear product.  Also here: the L^2
growth audits, the step-size law, the almost-conservation sweep, and the
segment-iterated global run.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import (Field, Grid, Representation, as_physical,
                   forward_transform, inverse_transform, lp_norm)
from .ioperator import EnergyReport, MultiplierSpec, energy, gradient_I_norm, modified_energy
from .fitting import ExponentFit, loglog_fit

log = logging.getLogger(__name__)

__all__ = [
    "BlowUpError", "EvolveConfig", "Trajectory", "StepLawInput",
    "nonlinearity", "step", "evolve", "l2_growth_audit", "delta_step",
    "rough_datum", "almost_conservation_experiment", "iterate_global",
]


class BlowUpError(RuntimeError):
    """Raised when the state turns non-finite; carries the time stamp."""

    def __init__(self, time: float, trajectory=None):
        super().__init__(f"non-finite values at t = {time:.6g}")
        self.time = time
        self.trajectory = trajectory


@dataclass(frozen=True)
class EvolveConfig:
    grid: Grid
    dt: float
    t_end: float
    diagnostics_every: int = 1
    dealias: bool = True
    nonlinearity_enabled: bool = True

    def __post_init__(self):
        if not (0 < self.dt <= self.t_end):
            raise ValueError("need 0 < dt <= t_end")
        steps = self.n_steps
        if abs(steps * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise ValueError("t_end must be an integer multiple of dt")
        if self.diagnostics_every < 1 or steps % self.diagnostics_every != 0:
            raise ValueError("diagnostics cadence must divide the step count")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    snapshots: list                 # [(time, Field[Physical])]
    reports: list                   # EnergyReport for u
    reports_I: dict                 # MultiplierSpec -> [EnergyReport]
    cfg: EvolveConfig

    def times(self):
        return [t for t, _ in self.snapshots]


def _F(u: np.ndarray) -> np.ndarray:
    """F(u) = (1+u)(|u|^2 + 2 Re u)."""
    return (1 + u) * (np.abs(u) ** 2 + 2 * u.real)


def nonlinearity(f: Field, dealias: bool = True) -> Field:
    if f.representation is not Representation.PHYSICAL:
        raise ValueError("nonlinearity expects a physical-representation field")
    vals = _F(f.values)
    if dealias:
        coef = np.fft.fftn(vals) * f.grid.dealias_mask()
        vals = np.fft.ifftn(coef)
    return Field.physical(f.grid, vals)


def _step_raw(uh, xi2, half_phase, dt, mask, nonlinear):
    """One Strang step on raw fftn coefficients."""
    uh = uh * half_phase
    if nonlinear:
        u = np.fft.ifftn(uh)
        k1 = 1j * _F(u)
        k2 = 1j * _F(u + dt / 2 * k1)
        k3 = 1j * _F(u + dt / 2 * k2)
        k4 = 1j * _F(u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        uh = np.fft.fftn(u)
        if mask is not None:
            uh = uh * mask
    return uh * half_phase


def step(f: Field, dt: float, dealias: bool = True,
         nonlinearity_enabled: bool = True) -> Field:
    """Advance a field by one Strang-splitting step of size dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = as_physical(f)
    uh = np.fft.fftn(g.values)
    xi2 = g.grid.xi_abs() ** 2
    half_phase = np.exp(1j * xi2 * dt / 2)
    mask = g.grid.dealias_mask() if dealias else None
    uh = _step_raw(uh, xi2, half_phase, dt, mask, nonlinearity_enabled)
    if not np.all(np.isfinite(uh)):
        raise BlowUpError(dt)
    out = Field.physical(g.grid, np.fft.ifftn(uh))
    return out if f.representation is Representation.PHYSICAL else forward_transform(out)


def evolve(u0: Field, cfg: EvolveConfig, specs=()) -> Trajectory:
    """Integrate u0 to t_end, reporting E(u) and E(Iu) at the cadence."""
    if u0.grid != cfg.grid:
        raise ValueError("initial datum lives on a different grid")
    specs = tuple(specs)
    g0 = as_physical(u0)
    uh = np.fft.fftn(g0.values)
    xi2 = cfg.grid.xi_abs() ** 2
    half_phase = np.exp(1j * xi2 * cfg.dt / 2)
    mask = cfg.grid.dealias_mask() if cfg.dealias else None

    traj = Trajectory(snapshots=[], reports=[], reports_I={sp: [] for sp in specs},
                      cfg=cfg)

    def record(t, uh_now):
        f = Field.physical(cfg.grid, np.fft.ifftn(uh_now))
        traj.snapshots.append((t, f))
        traj.reports.append(energy(f, time=t))
        for sp in specs:
            traj.reports_I[sp].append(modified_energy(f, sp, time=t))

    record(0.0, uh)
    for i in range(1, cfg.n_steps + 1):
        uh = _step_raw(uh, xi2, half_phase, cfg.dt, mask, cfg.nonlinearity_enabled)
        t = i * cfg.dt
        if not np.all(np.isfinite(uh)):
            raise BlowUpError(t, trajectory=traj)
        if i % cfg.diagnostics_every == 0:
            record(t, uh)
    return traj


# ---------------------------------------------------------------------------
# L^2 growth audits

@dataclass(frozen=True)
class GrowthAudit:
    """Worst margins of the differential and Gronwall L^2 bounds.

    Margins are (bound - observed); nonnegative means the bound held.
    """

    differential_margin: float
    differential_tolerance: float
    gronwall_margin: float
    violations: int


def l2_growth_audit(traj: Trajectory) -> GrowthAudit:
    """Check d/dt ||u||^2 <= 2 int (|u|^3 + 2|u|^2) and the closed bound."""
    if len(traj.snapshots) < 3:
        raise ValueError("audit needs at least three snapshots")
    ts = np.array(traj.times())
    l2 = np.array([r.l2 for r in traj.reports])
    rhs = np.array([2.0 * (lp_norm(f, 3) ** 3 + 2.0 * lp_norm(f, 2) ** 2)
                    for _, f in traj.snapshots])
    scale = float(rhs.max()) if rhs.max() > 0 else 1.0
    tol = 10.0 * traj.cfg.dt * scale

    # centered discrete derivative of ||u||^2 at interior report times
    d = (l2[2:] ** 2 - l2[:-2] ** 2) / (ts[2:] - ts[:-2])
    diff_margins = rhs[1:-1] + tol - d
    worst_diff = float(diff_margins.min())

    e0 = traj.reports[0].total
    bound = l2[0] + math.sqrt(2.0 * e0) * ts + 10.0 * traj.cfg.dt ** 2
    gron_margins = bound - l2
    worst_gron = float(gron_margins.min())

    violations = int(np.sum(diff_margins < 0) + np.sum(gron_margins < 0))
    return GrowthAudit(differential_margin=worst_diff, differential_tolerance=tol,
                       gronwall_margin=worst_gron, violations=violations)


# ---------------------------------------------------------------------------
# step-size law

@dataclass(frozen=True)
class StepLawInput:
    """(N, s, g) with g carrying ||grad I u0||^2 at the segment start."""

    N: object
    s: object
    g: object


def _is_exact(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    mod = type(x).__module__
    return mod.startswith("sympy")


def delta_step(inp: StepLawInput):
    """Local step length from the three-term balance, epsilons dropped.

    delta = min(1, d1, d2, d3) with
        d1 = (N^{2(1-s)}/g)^{1/(s-1/2)},
        d2 = (N^{1-s}/g)^{2/s},
        d3 = g^{-2}.

    When N, s, g are all exact (int, Fraction, or sympy numbers) the result
    is an exact sympy expression; otherwise a float.
    """
    N, s, g = inp.N, inp.s, inp.g
    if float(s) <= 0.5:
        raise ValueError("step law needs s > 1/2 (the d1 exponent degenerates)")
    if not (float(N) >= 1):
        raise ValueError("step law needs N >= 1")
    if float(g) < 0:
        raise ValueError("g = ||grad I u0||^2 must be nonnegative")
    if float(g) == 0:
        return 1
    if all(_is_exact(x) for x in (N, s, g)):
        import sympy as sp
        N_, s_, g_ = sp.nsimplify(N), sp.nsimplify(s), sp.sympify(g)
        d1 = (N_ ** (2 * (1 - s_)) / g_) ** (1 / (s_ - sp.Rational(1, 2)))
        d2 = (N_ ** (1 - s_) / g_) ** (2 / s_)
        d3 = g_ ** -2
        return sp.Min(1, sp.powsimp(d1), sp.powsimp(d2), sp.powsimp(d3))
    N, s, g = float(N), float(s), float(g)
    d1 = (N ** (2 * (1 - s)) / g) ** (1 / (s - 0.5))
    d2 = (N ** (1 - s) / g) ** (2 / s)
    d3 = g ** -2
    return min(1.0, d1, d2, d3)


# ---------------------------------------------------------------------------
# rough data and the almost-conservation sweep

def rough_datum(grid: Grid, s: float, seed: int, pad: float = 0.01) -> Field:
    """Synthetic H^s-but-not-better datum, normalized to ||u||_{H^s} = 1.

    Spectral profile <xi>^{-s - d/2 - pad} with uniform random phases.  The
    tail is cut at the dealias boundary |xi| <= (2/3) xi_max so that the
    2/3-rule truncation inside the stepper never eats datum mass (otherwise
    every N sees the same spurious first-step energy jump).
    """
    rng = np.random.default_rng(seed)
    absxi = grid.xi_abs()
    amp = (1.0 + absxi ** 2) ** (-(s + grid.dim / 2 + pad) / 2)
    phase = np.exp(2j * np.pi * rng.uniform(size=grid.shape))
    cut = absxi <= (2.0 / 3.0) * absxi.max()
    coef = amp * phase * cut
    f = Field.spectral(grid, coef)
    from .grid import sobolev_norm
    nrm = sobolev_norm(f, s)
    return inverse_transform(Field.spectral(grid, coef / nrm))


@dataclass(frozen=True)
class AlmostConservationRow:
    N: float
    increment_window: float     # |E(I u(window)) - E(I u0)|
    increment_delta: float      # same at t = min(delta_step, window)
    delta: float
    gradI_norm: float           # ||grad I u0||


@dataclass(frozen=True)
class AlmostConservationResult:
    rows: tuple
    fit: ExponentFit
    window: float
    s: float


def almost_conservation_experiment(u0: Field, s: float, N_list, window: float,
                                   dt: float = 2.5e-4) -> AlmostConservationResult:
    """Sweep N, measuring the modified-energy increment over a fixed window."""
    if not (0 < window <= 1):
        raise ValueError("window must lie in (0, 1]")
    steps = int(round(window / dt))
    cfg = EvolveConfig(grid=u0.grid, dt=window / steps, t_end=window,
                       diagnostics_every=1)
    specs = [MultiplierSpec(N=N, s=s) for N in N_list]
    traj = evolve(u0, cfg, specs)
    ts = np.array(traj.times())
    rows = []
    for sp in specs:
        series = traj.reports_I[sp]
        e0 = series[0].total
        inc_window = abs(series[-1].total - e0)
        gnorm = gradient_I_norm(u0, sp)
        delta = float(delta_step(StepLawInput(N=float(sp.N), s=float(s),
                                              g=gnorm ** 2)))
        t_delta = min(delta, window)
        idx = int(np.argmin(np.abs(ts - t_delta)))
        inc_delta = abs(series[idx].total - e0)
        rows.append(AlmostConservationRow(
            N=sp.N, increment_window=inc_window, increment_delta=inc_delta,
            delta=delta, gradI_norm=gnorm))
    fit = loglog_fit([r.N for r in rows],
                     [max(r.increment_window, 1e-300) for r in rows])
    return AlmostConservationResult(rows=tuple(rows), fit=fit,
                                    window=window, s=s)


# ---------------------------------------------------------------------------
# iterated global run

@dataclass(frozen=True)
class SegmentRecord:
    t_start: float
    delta: float
    modified_energy: float
    gradI_sq: float


@dataclass(frozen=True)
class GlobalRunLedger:
    segments: tuple             # SegmentRecord at every boundary
    e0: float
    max_ratio: float            # max E(Iu)/E(Iu0) over boundaries
    violated: bool              # ratio crossed 2


def iterate_global(u0: Field, s: float, N: float, T: float,
                   dt_hint: float = 1e-3):
    """Advance to time T in delta_step-sized segments, auditing E(Iu).

    Returns (final field, GlobalRunLedger).  A ledger violation (drift past
    twice the initial modified energy) is flagged and the run continues.
    """
    spec = MultiplierSpec(N=N, s=s)
    u = as_physical(u0)
    e0 = modified_energy(u, spec).total
    if e0 <= 0:
        e0 = 1.0
    t = 0.0
    segments = []
    max_ratio = 0.0
    while t < T - 1e-12:
        g = gradient_I_norm(u, spec) ** 2
        delta = float(delta_step(StepLawInput(N=float(N), s=float(s), g=g)))
        delta = min(delta, T - t)
        n_sub = max(1, int(math.ceil(delta / dt_hint)))
        dt = delta / n_sub
        e_here = modified_energy(u, spec).total
        segments.append(SegmentRecord(t_start=t, delta=delta,
                                      modified_energy=e_here, gradI_sq=g))
        max_ratio = max(max_ratio, e_here / e0)
        cfg = EvolveConfig(grid=u.grid, dt=dt, t_end=delta,
                           diagnostics_every=n_sub)
        traj = evolve(u, cfg)
        u = traj.snapshots[-1][1]
        t += delta
    e_final = modified_energy(u, spec).total
    segments.append(SegmentRecord(t_start=t, delta=0.0,
                                  modified_energy=e_final,
                                  gradI_sq=gradient_I_norm(u, spec) ** 2))
    max_ratio = max(max_ratio, e_final / e0)
    violated = max_ratio >= 2.0
    if violated:
        log.warning("modified-energy ledger violated: max ratio %.3f", max_ratio)
    ledger = GlobalRunLedger(segments=tuple(segments), e0=e0,
                             max_ratio=max_ratio, violated=violated)
    return u, ledger
