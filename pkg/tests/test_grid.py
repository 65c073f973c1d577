"""Oracles and properties for grids, transforms, norms, and serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpilab.grid import (BandKind, Field, FrequencyBand, Grid, Representation,
                         band_project, field_from_bytes, field_to_bytes,
                         forward_transform, gradient, homogeneous_norm,
                         inverse_transform, load_field, lp_norm, save_field,
                         sobolev_norm)


def random_field(grid, seed, band_limited=False):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    f = Field.physical(grid, vals)
    if band_limited:
        g = forward_transform(f)
        keep = grid.dealias_mask() & grid.nyquist_mask()
        f = inverse_transform(Field.spectral(grid, g.values * keep))
    return f


# ---------------------------------------------------------------------------
# construction and validation

def test_grid_rejects_bad_parameters():
    with pytest.raises(ValueError):
        Grid(dim=4, n=16, length=1.0)
    with pytest.raises(ValueError):
        Grid(dim=1, n=6, length=1.0)       # not a power of two
    with pytest.raises(ValueError):
        Grid(dim=1, n=48, length=1.0)
    with pytest.raises(ValueError):
        Grid(dim=1, n=16, length=0.0)


def test_field_values_are_frozen():
    g = Grid(dim=1, n=16, length=1.0)
    f = Field.zero(g)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_field_shape_must_match_grid():
    g = Grid(dim=2, n=16, length=1.0)
    with pytest.raises(ValueError):
        Field.physical(g, np.zeros(16, dtype=complex))


# ---------------------------------------------------------------------------
# transforms: unitarity and round trips

@pytest.mark.parametrize("dim,n", [(1, 64), (2, 32), (3, 16)])
def test_parseval_matches_quadrature(dim, n):
    g = Grid(dim=dim, n=n, length=5.0)
    f = random_field(g, seed=dim)
    w = g.dx ** g.dim
    phys = float(np.sum(np.abs(f.values) ** 2) * w)
    spec = float(np.sum(np.abs(forward_transform(f).values) ** 2))
    assert abs(phys - spec) <= 1e-12 * phys


@pytest.mark.parametrize("dim,n", [(1, 64), (2, 32), (3, 16)])
def test_round_trip_is_identity(dim, n):
    g = Grid(dim=dim, n=n, length=2 * np.pi)
    f = random_field(g, seed=10 + dim)
    back = inverse_transform(forward_transform(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_transform_direction_is_enforced():
    g = Grid(dim=1, n=16, length=1.0)
    f = Field.zero(g)                       # physical
    with pytest.raises(ValueError):
        inverse_transform(f)
    with pytest.raises(ValueError):
        forward_transform(forward_transform(f))


def test_plane_wave_hits_single_mode():
    # e^{i xi_k x} must land on exactly one coefficient of modulus sqrt(V)
    g = Grid(dim=1, n=32, length=4.0)
    k = 3
    xi = 2 * np.pi * k / g.length
    f = Field.physical(g, np.exp(1j * xi * g.x_mesh()[0]))
    coef = forward_transform(f).values
    assert abs(abs(coef[k]) - math.sqrt(g.volume)) < 1e-12
    coef = coef.copy()
    coef[k] = 0.0
    assert np.max(np.abs(coef)) < 1e-12


# ---------------------------------------------------------------------------
# norms

def test_lp_norm_of_constant_field():
    g = Grid(dim=2, n=16, length=3.0)
    f = Field.physical(g, np.full(g.shape, 2.0, dtype=complex))
    for p in (1, 2, 3, 4):
        assert abs(lp_norm(f, p) - 2.0 * g.volume ** (1.0 / p)) < 1e-12
    assert lp_norm(f, np.inf) == 2.0


def test_lp_norm_rejects_p_below_one():
    g = Grid(dim=1, n=16, length=1.0)
    with pytest.raises(ValueError):
        lp_norm(Field.zero(g), 0.5)


def test_sobolev_norm_on_plane_wave():
    g = Grid(dim=1, n=64, length=2 * np.pi)
    xi = 5.0
    f = Field.physical(g, np.exp(1j * xi * g.x_mesh()[0]))
    for s in (-1.0, 0.0, 0.5, 1.0, 2.0):
        expect = math.sqrt(g.volume) * (1 + xi ** 2) ** (s / 2)
        assert abs(sobolev_norm(f, s) - expect) < 1e-10 * expect


def test_homogeneous_norm_excludes_zero_mode():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    f = Field.physical(g, np.ones(g.shape, dtype=complex))
    assert homogeneous_norm(f, 1.0) == 0.0


def test_homogeneous_norm_negative_s_rejects_mean():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    f = Field.physical(g, 1.0 + np.exp(1j * g.x_mesh()[0]))
    with pytest.raises(ValueError):
        homogeneous_norm(f, -0.5)
    # mean-free field is fine
    f0 = Field.physical(g, np.exp(1j * g.x_mesh()[0]))
    assert homogeneous_norm(f0, -0.5) > 0


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(min_value=1e-3, max_value=1e3),
       seed=st.integers(min_value=0, max_value=2 ** 31))
def test_norms_are_absolutely_homogeneous(scale, seed):
    g = Grid(dim=1, n=32, length=2 * np.pi)
    f = random_field(g, seed)
    fs = Field.physical(g, scale * f.values)
    for norm in (lambda h: lp_norm(h, 2), lambda h: sobolev_norm(h, 0.7),
                 lambda h: homogeneous_norm(h, 1.0)):
        a, b = norm(fs), scale * norm(f)
        assert abs(a - b) <= 1e-9 * max(a, 1e-30)


def test_parseval_partition_over_bands():
    # each annulus [c/2, 2c) spans two octaves, so centers 4^k apart plus
    # a small ball tile the lattice exactly: norms must add up
    g = Grid(dim=2, n=64, length=2 * np.pi)
    f = random_field(g, seed=5)
    total = lp_norm(f, 2) ** 2
    pieces = lp_norm(band_project(f, FrequencyBand(1.0, BandKind.BALL)), 2) ** 2
    c = 2.0
    while c / 2 <= g.xi_abs().max():
        pieces += lp_norm(band_project(f, FrequencyBand(c, BandKind.ANNULUS)), 2) ** 2
        c *= 4
    assert abs(pieces - total) < 1e-10 * total


def test_band_project_preserves_representation():
    g = Grid(dim=1, n=32, length=2 * np.pi)
    f = random_field(g, seed=1)
    band = FrequencyBand(4.0)
    assert band_project(f, band).representation is Representation.PHYSICAL
    fs = forward_transform(f)
    assert band_project(fs, band).representation is Representation.SPECTRAL


def test_empty_band_warns_and_zeroes():
    g = Grid(dim=1, n=16, length=2 * np.pi)
    f = random_field(g, seed=2)
    with pytest.warns(UserWarning):
        out = band_project(f, FrequencyBand(1e6))
    assert np.all(out.values == 0)


# ---------------------------------------------------------------------------
# gradient

def test_gradient_matches_analytic_plane_wave():
    g = Grid(dim=2, n=32, length=2 * np.pi)
    xs = g.x_mesh()
    f = Field.physical(g, np.exp(1j * (3 * xs[0] - 2 * xs[1])))
    gx, gy = gradient(f)
    assert np.max(np.abs(gx.values - 3j * f.values)) < 1e-10
    assert np.max(np.abs(gy.values + 2j * f.values)) < 1e-10


def test_gradient_matches_finite_differences():
    # eighth-order centered stencil on a smooth periodic profile
    g = Grid(dim=1, n=128, length=2 * np.pi)
    x = g.x_mesh()[0]
    vals = np.exp(np.sin(x)) + 1j * np.cos(2 * x)
    f = Field.physical(g, vals)
    (gr,) = gradient(f)
    c = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5,
                  4 / 105, -1 / 280])
    fd = sum(ci * np.roll(vals, 4 - i) for i, ci in enumerate(c)) / g.dx
    assert np.max(np.abs(gr.values - fd)) < 1e-9


def test_gradient_norm_equals_homogeneous_norm():
    g = Grid(dim=2, n=32, length=2 * np.pi)
    f = random_field(g, seed=9, band_limited=True)   # keep Nyquist-free
    comps = gradient(f)
    direct = math.sqrt(sum(lp_norm(c, 2) ** 2 for c in comps))
    assert abs(direct - homogeneous_norm(f, 1.0)) < 1e-10 * max(direct, 1.0)


# ---------------------------------------------------------------------------
# serialization

@pytest.mark.parametrize("rep", [Representation.PHYSICAL, Representation.SPECTRAL])
def test_bytes_round_trip_is_exact(rep):
    g = Grid(dim=2, n=16, length=3.5)
    rng = np.random.default_rng(0)
    f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape), rep)
    back = field_from_bytes(field_to_bytes(f))
    assert back.grid == f.grid
    assert back.representation is rep
    assert np.array_equal(back.values, f.values)


def test_file_round_trip(tmp_path):
    g = Grid(dim=1, n=32, length=1.0)
    f = random_field(g, seed=4)
    path = tmp_path / "state.gpfd"
    save_field(f, path)
    back = load_field(path)
    assert np.array_equal(back.values, f.values)


def test_bad_magic_is_rejected():
    with pytest.raises(ValueError):
        field_from_bytes(b"NOPE" + b"\x00" * 64)


def test_truncated_payload_is_rejected():
    g = Grid(dim=1, n=16, length=1.0)
    buf = field_to_bytes(Field.zero(g))
    with pytest.raises(ValueError):
        field_from_bytes(buf[:-8])
