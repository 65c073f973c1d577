"""Integrator, growth audits, step law, and the conservation sweeps."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from gpilab.grid import (Field, Grid, band_project, FrequencyBand, BandKind,
                         forward_transform, lp_norm, sobolev_norm)
from gpilab.dynamics import (BlowUpError, EvolveConfig, StepLawInput,
                             almost_conservation_experiment, delta_step,
                             evolve, iterate_global, l2_growth_audit,
                             nonlinearity, rough_datum, step)
from gpilab.ioperator import MultiplierSpec


def smooth_datum(grid, amp=0.2):
    x = grid.x_mesh()[0]
    return Field.physical(grid, amp * np.exp(1j * x) + 0.5 * amp * np.cos(2 * x))


# ---------------------------------------------------------------------------
# configuration validation

def test_evolve_config_rejects_bad_input():
    g = Grid(dim=1, n=16, length=1.0)
    with pytest.raises(ValueError):
        EvolveConfig(grid=g, dt=0.3, t_end=1.0)          # not a divisor
    with pytest.raises(ValueError):
        EvolveConfig(grid=g, dt=-0.1, t_end=1.0)
    with pytest.raises(ValueError):
        EvolveConfig(grid=g, dt=0.1, t_end=1.0, diagnostics_every=3)


def test_nonlinearity_requires_physical_representation():
    g = Grid(dim=1, n=16, length=1.0)
    with pytest.raises(ValueError):
        nonlinearity(forward_transform(Field.zero(g)))


# ---------------------------------------------------------------------------
# linear flow sanity

def test_linear_step_preserves_l2_exactly():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    f = smooth_datum(g)
    out = step(f, 0.01, nonlinearity_enabled=False)
    assert abs(lp_norm(out, 2) - lp_norm(f, 2)) < 1e-13


def test_linear_evolution_matches_spectral_phase():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    f = smooth_datum(g)
    cfg = EvolveConfig(grid=g, dt=0.01, t_end=0.1, diagnostics_every=10,
                       nonlinearity_enabled=False)
    traj = evolve(f, cfg)
    coef = forward_transform(f).values
    exact = coef * np.exp(1j * g.xi_abs() ** 2 * 0.1)
    got = forward_transform(traj.snapshots[-1][1]).values
    assert np.max(np.abs(got - exact)) < 1e-12


def test_zero_datum_stays_zero():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    cfg = EvolveConfig(grid=g, dt=0.01, t_end=0.1)
    traj = evolve(Field.zero(g), cfg)
    assert all(r.total == 0.0 for r in traj.reports)


def test_blow_up_carries_partial_trajectory():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    big = Field.physical(g, 50.0 * np.exp(1j * g.x_mesh()[0]))
    with pytest.raises(BlowUpError) as err, np.errstate(all="ignore"):
        evolve(big, EvolveConfig(grid=g, dt=0.1, t_end=1.0))
    assert err.value.time > 0
    assert err.value.trajectory is not None
    assert len(err.value.trajectory.reports) >= 1


def test_energy_drift_shrinks_with_dt():
    g = Grid(dim=1, n=128, length=2 * np.pi)
    u0 = smooth_datum(g)
    drifts = []
    for dt in (2e-3, 1e-3):
        cfg = EvolveConfig(grid=g, dt=dt, t_end=0.2,
                           diagnostics_every=int(round(0.2 / dt)))
        traj = evolve(u0, cfg)
        e = [r.total for r in traj.reports]
        drifts.append(abs(e[-1] - e[0]) / e[0])
    assert drifts[1] < drifts[0]
    assert 2.5 < drifts[0] / drifts[1] < 6.0     # second-order splitting


def test_growth_audit_passes_on_smooth_run():
    g = Grid(dim=1, n=128, length=2 * np.pi)
    cfg = EvolveConfig(grid=g, dt=1e-3, t_end=0.2, diagnostics_every=10)
    audit = l2_growth_audit(evolve(smooth_datum(g), cfg))
    assert audit.violations == 0
    assert audit.differential_margin > 0
    assert audit.gronwall_margin > 0


def test_growth_audit_needs_enough_snapshots():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    cfg = EvolveConfig(grid=g, dt=0.1, t_end=0.1)
    with pytest.raises(ValueError):
        l2_growth_audit(evolve(Field.zero(g), cfg))


# ---------------------------------------------------------------------------
# step law

def test_delta_step_exact_power_law():
    # g = N^{2(1-s)} makes the cap term bind: delta = N^{-4(1-s)} exactly
    for s in (Fraction(3, 4), Fraction(5, 6), Fraction(9, 10)):
        for N in (4, 16, 64):
            gval = sp.Integer(N) ** (2 * (1 - sp.Rational(s)))
            got = delta_step(StepLawInput(N=N, s=s, g=gval))
            expect = sp.Integer(N) ** (-4 * (1 - sp.Rational(s)))
            assert sp.simplify(got - expect) == 0


def test_delta_step_float_path_agrees_with_exact():
    s, N, gval = 0.75, 16, 3.7
    fl = delta_step(StepLawInput(N=N, s=s, g=gval))
    ex = delta_step(StepLawInput(N=sp.Integer(N), s=sp.Rational(3, 4),
                                 g=sp.Rational(37, 10)))
    assert abs(fl - float(ex)) < 1e-12 * float(ex)


def test_delta_step_edge_cases():
    assert delta_step(StepLawInput(N=4, s=Fraction(3, 4), g=0)) == 1
    with pytest.raises(ValueError):
        delta_step(StepLawInput(N=4, s=0.5, g=1.0))
    with pytest.raises(ValueError):
        delta_step(StepLawInput(N=0.5, s=0.75, g=1.0))
    with pytest.raises(ValueError):
        delta_step(StepLawInput(N=4, s=0.75, g=-1.0))
    # tiny gradient: the unit cap binds
    assert delta_step(StepLawInput(N=4, s=0.75, g=1e-8)) == 1.0


def test_delta_step_monotone_in_g():
    deltas = [delta_step(StepLawInput(N=8, s=0.75, g=g))
              for g in (0.5, 2.0, 8.0, 32.0)]
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))


# ---------------------------------------------------------------------------
# rough data and almost conservation

def test_rough_datum_is_normalized_and_band_limited():
    g = Grid(dim=1, n=256, length=16 * np.pi)
    f = rough_datum(g, 0.9, seed=0)
    assert abs(sobolev_norm(f, 0.9) - 1.0) < 1e-10
    coef = forward_transform(f).values
    outside = ~ (g.xi_abs() <= (2.0 / 3.0) * g.xi_abs().max())
    # transform round-trip noise only; no real mass beyond the cut
    assert np.max(np.abs(coef[outside])) < 1e-14


def test_rough_datum_is_deterministic_per_seed():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    a = rough_datum(g, 0.8, seed=3)
    b = rough_datum(g, 0.8, seed=3)
    c = rough_datum(g, 0.8, seed=4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_almost_conservation_smoke():
    g = Grid(dim=1, n=256, length=16 * np.pi)
    u0 = rough_datum(g, 0.9, seed=7)
    res = almost_conservation_experiment(u0, 0.9, [4, 8], window=0.05, dt=1e-3)
    assert len(res.rows) == 2
    assert res.rows[0].N == 4 and res.rows[1].N == 8
    assert all(r.increment_window >= 0 for r in res.rows)
    assert all(r.delta > 0 for r in res.rows)


def test_almost_conservation_rejects_bad_window():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    with pytest.raises(ValueError):
        almost_conservation_experiment(Field.zero(g), 0.9, [4], window=0.0)


# ---------------------------------------------------------------------------
# iterated global run

def test_iterate_global_smooth_datum_conserves():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    u0 = Field.physical(g, 0.05 * np.exp(1j * g.x_mesh()[0]))
    u, ledger = iterate_global(u0, s=0.9, N=8, T=1.0)
    assert not ledger.violated
    assert ledger.max_ratio < 1.01
    assert ledger.segments[0].t_start == 0.0
    assert ledger.segments[-1].delta == 0.0
    # segment starts are increasing and reach T
    starts = [seg.t_start for seg in ledger.segments]
    assert starts == sorted(starts)
    assert abs(starts[-1] - 1.0) < 1e-9


def test_iterate_global_rough_datum_stays_below_criterion():
    g = Grid(dim=1, n=256, length=16 * np.pi)
    u0 = rough_datum(g, 0.9, seed=3)
    _, ledger = iterate_global(u0, s=0.9, N=8, T=1.0)
    assert ledger.max_ratio < 2.0
    assert not ledger.violated
