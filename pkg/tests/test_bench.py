"""Strichartz, bilinear, and interpolation bench tests (desk scale)."""

import math

import numpy as np
import pytest

from gpilab.grid import Field, Grid, forward_transform, lp_norm
from gpilab.bench import (MixedNormSpec, band_datum, bilinear_ratio,
                          bilinear_sweep, free_evolution, gn_l3_audit,
                          mixed_norm, strichartz_admissible,
                          strichartz_ratio_sweep, time_cutoff,
                          _low_high_split)


# ---------------------------------------------------------------------------
# admissibility and mixed norms

def test_admissibility_truth_table():
    assert strichartz_admissible(2, 6)
    assert strichartz_admissible(math.inf, 2)
    assert not strichartz_admissible(4, 4)
    assert not strichartz_admissible(2, 2)
    assert not strichartz_admissible(1, 100)     # q below 2


def test_mixed_norm_constant_series():
    # time-constant series: norm = T^{1/q} ||f||_r
    g = Grid(dim=1, n=32, length=2 * np.pi)
    f = Field.physical(g, np.full(g.shape, 0.5, dtype=complex))
    spec = MixedNormSpec(q=2, r=4, T=3.0, m=32)
    series = [f] * 32
    expect = 3.0 ** 0.5 * lp_norm(f, 4)
    assert abs(mixed_norm(series, spec) - expect) < 1e-12 * expect


def test_mixed_norm_q_inf_is_sup():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    small = Field.physical(g, np.full(g.shape, 0.1, dtype=complex))
    big = Field.physical(g, np.full(g.shape, 0.7, dtype=complex))
    spec = MixedNormSpec(q=math.inf, r=2, T=1.0, m=16)
    series = [small] * 15 + [big]
    assert abs(mixed_norm(series, spec) - lp_norm(big, 2)) < 1e-12


def test_mixed_norm_spec_validation():
    with pytest.raises(ValueError):
        MixedNormSpec(q=0.5, r=2, T=1.0)
    with pytest.raises(ValueError):
        MixedNormSpec(q=2, r=2, T=1.0, m=8)
    with pytest.raises(ValueError):
        MixedNormSpec(q=2, r=2, T=0.0)
    with pytest.raises(ValueError):
        mixed_norm([], MixedNormSpec(q=2, r=2, T=1.0, m=16))


def test_free_evolution_is_unitary_and_additive():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    f = band_datum(g, 8.0, seed=0)
    u1 = free_evolution(f, 0.3)
    assert abs(lp_norm(u1, 2) - lp_norm(f, 2)) < 1e-12
    # group property: flowing 0.2 then 0.1 equals flowing 0.3
    u2 = free_evolution(free_evolution(f, 0.2), 0.1)
    assert np.max(np.abs(u1.values - u2.values)) < 1e-12


def test_time_cutoff_profile():
    T = 2.0
    ts = np.array([0.0, 0.1 * T, 0.5 * T, 0.9 * T, T])
    w = time_cutoff(ts, T)
    assert w[0] == 0.0 and w[-1] == 0.0
    assert abs(w[1] - 1.0) < 1e-12 and abs(w[3] - 1.0) < 1e-12
    assert w[2] == 1.0
    mid = time_cutoff(np.array([0.05 * T]), T)[0]
    assert 0.0 < mid < 1.0


# ---------------------------------------------------------------------------
# Strichartz sweep

def test_band_datum_unit_norm_and_support():
    g = Grid(dim=3, n=32, length=2 * np.pi)
    f = band_datum(g, 8.0, seed=1)
    coef = np.abs(f.values)
    assert abs(np.linalg.norm(coef) - 1.0) < 1e-12
    absxi = g.xi_abs()
    assert np.max(coef[(absxi < 4.0) | (absxi >= 16.0)]) == 0.0


def test_band_datum_rejects_unresolvable_center():
    g = Grid(dim=1, n=16, length=2 * np.pi)
    with pytest.raises(ValueError):
        band_datum(g, 1e6, seed=0)


def test_strichartz_sweep_rejects_inadmissible_pair():
    with pytest.raises(ValueError):
        strichartz_ratio_sweep(4, 4, T=0.3)


def test_strichartz_sweep_small_is_flat():
    res = strichartz_ratio_sweep(2, 6, T=0.3, centers=(4, 8, 16), seeds=2,
                                 grid=Grid(dim=3, n=32, length=2 * np.pi), m=16)
    assert abs(res["fit"].slope) < 0.2
    assert len(res["means"]) == 3


# ---------------------------------------------------------------------------
# bilinear refinement

def test_bilinear_ratio_validates_input():
    with pytest.raises(ValueError):
        bilinear_ratio(16, 8, seeds=1, T=0.5)


def test_bilinear_ratio_bounded_by_cauchy_schwarz():
    # with unit data and a cutoff <= 1, the ratio is at most ~ sup-norm factor
    stat = bilinear_ratio(8, 16, seeds=2, T=0.5)
    assert stat.max > 0
    assert len(stat.ratios) == 2
    assert stat.mean <= stat.max


def test_bilinear_gain_with_frequency_separation():
    # doubling the high frequency must lower the interaction ratio
    lo = bilinear_ratio(8, 8, seeds=3, T=0.5).mean
    hi = bilinear_ratio(8, 32, seeds=3, T=0.5).mean
    assert hi < lo


def test_bilinear_sweep_shapes():
    res = bilinear_sweep(seeds=1, T=0.5)
    assert len(res["N2_means"]) == 3 and len(res["N1_means"]) == 3
    assert res["N2_fit"].slope < 0      # decay in the high frequency
    assert res["N1_fit"].slope > 0      # growth in the low frequency


# ---------------------------------------------------------------------------
# L^3 interpolation chain

def random_smooth_field(seed):
    g = Grid(dim=1, n=128, length=2 * np.pi)
    rng = np.random.default_rng(seed)
    coef = np.zeros(g.shape, dtype=complex)
    ks = np.fft.fftfreq(g.n, d=1.0 / g.n).astype(int)
    sel = np.abs(ks) <= 20
    coef[sel] = ((rng.standard_normal(sel.sum())
                  + 1j * rng.standard_normal(sel.sum()))
                 / (1.0 + np.abs(ks[sel]) ** 2))
    from gpilab.grid import inverse_transform
    return inverse_transform(Field.spectral(g, coef))


def test_low_high_split_is_a_partition():
    f = random_smooth_field(0)
    u1, u2 = _low_high_split(f)
    recon = u1.values + u2.values
    spec_f = forward_transform(f) if f.representation.name == "PHYSICAL" else f
    assert np.max(np.abs(recon - spec_f.values)) < 1e-12
    # low piece has no content above |xi| = 2, high piece none below 1
    absxi = f.grid.xi_abs()
    assert np.max(np.abs(u1.values[absxi > 2.0])) < 1e-12
    assert np.max(np.abs(u2.values[absxi < 1.0])) < 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_gn_l3_chain_controls_l3(seed):
    rec = gn_l3_audit(random_smooth_field(seed), s=0.9)
    assert rec.lhs > 0
    # chain side dominates with a modest constant on smooth data
    assert rec.ratio < 4.0
    assert rec.lhs <= 4.0 * rec.rhs_gn


def test_gn_audit_zero_field():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    rec = gn_l3_audit(Field.zero(g))
    assert rec.lhs == 0.0 and rec.ratio == 0.0
