"""Grid layout, quadrature, weights, and discrete calculus."""
import numpy as np
import pytest

import landau
from landau.grid_field import gradient_values, laplacian_values

from oracle_values import LP_1_5_M_4_5_MU, MASS_MU_N16, MASS_MU_N64


def test_make_grid_validation():
    with pytest.raises(ValueError, match="n must be even"):
        landau.make_grid(9, 8.0)
    with pytest.raises(ValueError, match="n must be at least 8"):
        landau.make_grid(6, 8.0)
    with pytest.raises(ValueError, match="l must be positive"):
        landau.make_grid(16, 0.0)


def test_axis_cell_centered(grid16):
    g = grid16
    assert g.h == pytest.approx(2 * g.l / g.n)
    # symmetric about 0, no node at the origin
    assert np.allclose(g.axis, -g.axis[::-1])
    assert np.min(np.abs(g.axis)) == pytest.approx(g.h / 2)
    assert g.axis[0] == pytest.approx(-g.l + 0.5 * g.h)


def test_cell_volume(grid16):
    assert grid16.cell_volume() == pytest.approx(grid16.h ** 3)


def test_radius_and_bracket(grid16):
    g = grid16
    assert np.allclose(g.bracket2, 1.0 + g.radius2)
    i = g.n // 2
    assert g.radius2[i, i, i] == pytest.approx(3 * (g.h / 2) ** 2)


def test_maxwellian_mass_oracle(grid16, grid64):
    mu16 = landau.maxwellian(grid16)
    mu64 = landau.maxwellian(grid64)
    assert landau.integrate(mu16) == pytest.approx(MASS_MU_N16, abs=1e-13)
    assert landau.integrate(mu64) == pytest.approx(MASS_MU_N64, abs=1e-13)


def test_field_validation(grid16):
    with pytest.raises(ValueError, match="values shape does not match grid"):
        landau.ScalarField(grid16, np.zeros((4, 4, 4)))
    bad = np.zeros((16, 16, 16))
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValueError, match="field values must be finite"):
        landau.ScalarField(grid16, bad)


def test_weight_field_values(grid16):
    w = landau.weight_field(grid16, 4.5)
    assert np.allclose(w.values, grid16.bracket2 ** 2.25)


def test_weight_field_log_space(grid16):
    # m = 60 would overflow the direct power at the corners; log path must not
    w = landau.weight_field(grid16, 60.0)
    assert np.all(np.isfinite(w.values))
    i = grid16.n // 2
    b = grid16.bracket2[i, i, i]
    assert w.values[i, i, i] == pytest.approx(b ** 30.0, rel=1e-12)


def test_weighted_lp_norm_maxwellian(grid64):
    mu = landau.maxwellian(grid64)
    # second moment with unit weight: integral of <v>^2 mu = 1 + 3
    val = landau.weighted_lp_norm(mu, 1.0, 2.0)
    assert val == pytest.approx(4.0, rel=1e-5)
    assert landau.weighted_lp_norm(mu, 1.5, 4.5) == pytest.approx(
        LP_1_5_M_4_5_MU, rel=1e-6
    )


def test_weighted_lp_norm_validation(grid16):
    mu = landau.maxwellian(grid16)
    with pytest.raises(ValueError, match="p must be at least 1"):
        landau.weighted_lp_norm(mu, 0.5, 0.0)


def test_negative_clip_counter(grid16):
    from landau import grid_field

    grid_field.reset_negative_clip_count()
    vals = np.full((16, 16, 16), 1.0)
    vals[0, 0, 0] = -1e-3
    f = landau.ScalarField(grid16, vals)
    before = grid_field.negative_clip_count()
    landau.weighted_lp_norm(f, 1.5, 0.0)
    assert grid_field.negative_clip_count() == before + 1
    grid_field.reset_negative_clip_count()
    assert grid_field.negative_clip_count() == 0


def test_gradient_exact_on_linear(grid16):
    g = grid16
    vals = 2.0 * g.coords[0] - 3.0 * g.coords[1] + 0.5 * g.coords[2]
    grad = gradient_values(g, vals)
    assert np.allclose(grad[0], 2.0, atol=1e-12)
    assert np.allclose(grad[1], -3.0, atol=1e-12)
    assert np.allclose(grad[2], 0.5, atol=1e-12)


def test_gradient_field_wrapper(grid16):
    mu = landau.maxwellian(grid16)
    vf = landau.gradient(mu)
    assert vf.values.shape == (3, 16, 16, 16)
    assert np.allclose(vf.values, gradient_values(grid16, mu.values))


def test_laplacian_exact_on_quadratic(grid16):
    # second differences are exact on |v|^2, one-sided stencils included
    lap = laplacian_values(grid16, grid16.radius2.copy())
    assert np.allclose(lap, 6.0, atol=1e-10)


def test_laplacian_field_wrapper(grid16):
    f = landau.ScalarField(grid16, grid16.radius2.copy())
    lap = landau.laplacian(f)
    assert np.allclose(lap.values, 6.0, atol=1e-10)


def test_level_set_split_identity(grid16):
    mu = landau.maxwellian(grid16)
    level = 0.3 * float(mu.values.max())
    excess, bulk = landau.level_set_split(mu, level)
    assert np.allclose(excess.values + bulk.values, mu.values)
    assert np.all(excess.values >= 0)
    assert np.all(bulk.values <= level + 1e-15)
    # at level 0 everything is excess
    e0, b0 = landau.level_set_split(mu, 0.0)
    assert np.allclose(e0.values, mu.values)
    assert np.allclose(b0.values, 0.0)


def test_level_set_split_monotone(grid16):
    mu = landau.maxwellian(grid16)
    m = float(mu.values.max())
    e1, _ = landau.level_set_split(mu, 0.2 * m)
    e2, _ = landau.level_set_split(mu, 0.4 * m)
    assert landau.integrate(e2) <= landau.integrate(e1)


def test_level_set_split_validation(grid16):
    mu = landau.maxwellian(grid16)
    with pytest.raises(ValueError, match="level must be nonnegative"):
        landau.level_set_split(mu, -0.1)
