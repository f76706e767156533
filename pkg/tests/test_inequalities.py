"""Product, commutator, quotient, and interpolation estimates on seeded families."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusgas.inequalities import (
    FAMILY_MAX_MODE,
    RHO_FLUCTUATION,
    RHO_MAX_MODE,
    RandomFieldSpec,
    _bounded_density,
    algebra_family_ratios,
    algebra_ratio,
    commutator_family_ratios,
    commutator_ratio,
    family_seed,
    interpolation_family_rows,
    interpolation_gap,
    product_exact,
    random_field,
    reciprocal_family_ratios,
    reciprocal_ratio,
)
from torusgas.spectral import (
    Field,
    constant_field,
    make_grid,
    sobolev_norm,
    synthesize,
)


def rolled(f, shift_x, shift_y):
    """Translate a field by whole grid nodes (exact on the torus)."""
    return Field(f.grid, samples=np.roll(f.samples, (shift_x, shift_y), axis=(0, 1)))


class TestRandomField:
    def test_deterministic(self):
        grid = make_grid(64)
        spec = RandomFieldSpec(max_mode=6, seed=11)
        a = random_field(grid, spec)
        b = random_field(grid, spec)
        assert np.array_equal(a.samples, b.samples)

    def test_seed_changes_field(self):
        grid = make_grid(64)
        a = random_field(grid, RandomFieldSpec(max_mode=6, seed=1))
        b = random_field(grid, RandomFieldSpec(max_mode=6, seed=2))
        assert not np.array_equal(a.samples, b.samples)

    def test_zero_mean_and_band_limited(self):
        grid = make_grid(64)
        f = random_field(grid, RandomFieldSpec(max_mode=5, seed=3))
        assert abs(f.mean()) <= 1e-15
        k = grid.wavenumbers
        outside = (np.abs(k)[:, None] > 5) | (np.abs(k)[None, :] > 5)
        assert np.all(f.coefficients[outside] == 0.0)

    def test_rejects_mode_beyond_band(self):
        grid = make_grid(16)
        with pytest.raises(ValueError, match="dealias band"):
            random_field(grid, RandomFieldSpec(max_mode=6))

    def test_spec_validation(self):
        with pytest.raises(ValueError, match="positive integer"):
            RandomFieldSpec(max_mode=0)
        with pytest.raises(ValueError, match="nonnegative"):
            RandomFieldSpec(max_mode=4, spectrum_decay=-1.0)


class TestProductExact:
    def test_matches_closed_form(self):
        # cos(y)^2 = 1/2 + cos(2y)/2
        grid = make_grid(32)
        f = synthesize(grid, [(0, 1, 1.0, "cos", 0.0)])
        p = product_exact(f, f)
        expected = synthesize(grid, [(0, 2, 0.5, "cos", 0.0)]).samples + 0.5
        assert np.max(np.abs(p.samples - expected)) <= 1e-14

    def test_grid_mismatch(self):
        f = constant_field(make_grid(16), 1.0)
        g = constant_field(make_grid(32), 1.0)
        with pytest.raises(ValueError, match="different grids"):
            product_exact(f, g)


class TestCommutatorRatio:
    def test_constant_u_oracle(self):
        # u constant: numerator is |c| ||(L^2 - 1) f||_L2 = 9 sqrt(2) pi |c|
        # for f = cos(3x), and the ratio reduces to 9 / (2 pi 10^{3/2})
        grid = make_grid(64)
        f = synthesize(grid, [(3, 0, 1.0, "cos", 0.0)])
        u = constant_field(grid, 0.7)
        expected = 9.0 / (2.0 * np.pi * 10.0**1.5)
        assert commutator_ratio(f, u, 2.0, 3.0) == pytest.approx(expected, rel=1e-12)

    def test_constant_f_vanishes(self):
        grid = make_grid(64)
        f = constant_field(grid, 2.0)
        u = synthesize(grid, [(2, -1, 0.8, "sin", 0.3)])
        assert commutator_ratio(f, u, 1.5, 3.0) <= 1e-13

    def test_zero_u(self):
        grid = make_grid(32)
        f = synthesize(grid, [(1, 0, 1.0, "cos", 0.0)])
        assert commutator_ratio(f, constant_field(grid, 0.0), 2.0, 3.0) == 0.0

    def test_translation_invariance(self):
        grid = make_grid(64)
        f = random_field(grid, RandomFieldSpec(max_mode=6, seed=5))
        u = random_field(grid, RandomFieldSpec(max_mode=6, seed=6))
        base = commutator_ratio(f, u, 1.5, 3.0)
        moved = commutator_ratio(rolled(f, 7, 13), rolled(u, 7, 13), 1.5, 3.0)
        assert moved == pytest.approx(base, rel=1e-12)

    def test_parameter_validation(self):
        grid = make_grid(32)
        f = synthesize(grid, [(1, 0, 1.0, "cos", 0.0)])
        u = synthesize(grid, [(0, 1, 1.0, "cos", 0.0)])
        with pytest.raises(ValueError, match="k must exceed 2"):
            commutator_ratio(f, u, 1.5, 2.0)
        with pytest.raises(ValueError, match="sigma must lie in"):
            commutator_ratio(f, u, 3.5, 3.0)

    def test_rejects_unresolved_factor(self):
        grid = make_grid(16)
        f = synthesize(grid, [(6, 0, 1.0, "cos", 0.0)])  # beyond cutoff 5
        u = synthesize(grid, [(0, 1, 1.0, "cos", 0.0)])
        with pytest.raises(ValueError, match="band-limited"):
            commutator_ratio(f, u, 2.0, 3.0)


class TestReciprocalRatio:
    def test_constant_density_oracle(self):
        grid = make_grid(32)
        f = synthesize(grid, [(2, 1, 1.0, "cos", 0.0)])
        for c in (0.5, 1.0, 2.0):
            ratio = reciprocal_ratio(f, constant_field(grid, c), 1.5, 3.0)
            assert ratio == pytest.approx(1.0 / c, rel=1e-12)

    def test_zero_numerator_field(self):
        grid = make_grid(32)
        rho = constant_field(grid, 1.0)
        assert reciprocal_ratio(constant_field(grid, 0.0), rho, 1.5, 3.0) == 0.0

    def test_rejects_nonpositive_density(self):
        grid = make_grid(32)
        f = synthesize(grid, [(1, 0, 1.0, "cos", 0.0)])
        rho = synthesize(grid, [(0, 1, 2.0, "cos", 0.0)])  # dips to -2
        with pytest.raises(ValueError, match="strictly positive"):
            reciprocal_ratio(f, rho, 1.5, 3.0)

    def test_parameter_validation(self):
        grid = make_grid(32)
        f = synthesize(grid, [(1, 0, 1.0, "cos", 0.0)])
        rho = constant_field(grid, 1.0)
        with pytest.raises(ValueError, match="s must exceed 1"):
            reciprocal_ratio(f, rho, 0.5, 1.0)
        with pytest.raises(ValueError, match="must not exceed"):
            reciprocal_ratio(f, rho, 3.5, 3.0)


class TestAlgebraRatio:
    def test_constant_factor_oracle(self):
        grid = make_grid(32)
        f = synthesize(grid, [(3, -2, 0.9, "sin", 1.1)])
        ratio = algebra_ratio(f, constant_field(grid, 4.0), 2.0)
        assert ratio == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-12)

    def test_cos_squared_oracle(self):
        # ||cos^2 y||_2 = 2 pi sqrt(27/8), ||cos y||_2 = 2 pi sqrt(2)
        grid = make_grid(32)
        f = synthesize(grid, [(0, 1, 1.0, "cos", 0.0)])
        expected = 2.0 * np.pi * np.sqrt(27.0 / 8.0) / (2.0 * np.pi * np.sqrt(2.0)) ** 2
        assert algebra_ratio(f, f, 2.0) == pytest.approx(expected, rel=1e-12)

    def test_symmetry(self):
        grid = make_grid(64)
        f = random_field(grid, RandomFieldSpec(max_mode=7, seed=8))
        g = random_field(grid, RandomFieldSpec(max_mode=7, seed=9))
        assert algebra_ratio(f, g, 1.5) == pytest.approx(
            algebra_ratio(g, f, 1.5), rel=1e-13
        )

    def test_parameter_validation(self):
        grid = make_grid(32)
        f = constant_field(grid, 1.0)
        with pytest.raises(ValueError, match="sigma must exceed 1"):
            algebra_ratio(f, f, 1.0)


class TestInterpolationGap:
    def test_single_mode_equality(self):
        grid = make_grid(64)
        for kx, ky in [(0, 1), (2, 3), (5, -4)]:
            u = synthesize(grid, [(kx, ky, 1.3, "cos", 0.7)])
            assert abs(interpolation_gap(u, 1.5, 3.0, 4.0)) <= 1e-12

    def test_zero_field(self):
        grid = make_grid(32)
        assert interpolation_gap(constant_field(grid, 0.0), 1.5, 3.0, 4.0) == 0.0

    def test_two_mode_strictly_positive(self):
        grid = make_grid(64)
        u = synthesize(grid, [(0, 1, 1.0, "cos", 0.0), (4, 2, 1.0, "cos", 0.0)])
        assert interpolation_gap(u, 1.5, 3.0, 4.0) > 1e-3

    def test_order_validation(self):
        grid = make_grid(32)
        u = constant_field(grid, 1.0)
        with pytest.raises(ValueError, match="sigma < s < tau"):
            interpolation_gap(u, 3.0, 1.5, 4.0)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10**6))
    def test_gap_nonnegative_up_to_roundoff(self, seed):
        grid = make_grid(64)
        u = random_field(grid, RandomFieldSpec(max_mode=6, seed=seed))
        gap = interpolation_gap(u, 1.5, 3.0, 4.0)
        assert gap >= -1e-10 * max(sobolev_norm(u, 3.0), 1.0)


class TestFamilies:
    def test_family_seed_deterministic_and_distinct(self):
        assert family_seed(7, "algebra", 3) == family_seed(7, "algebra", 3)
        seeds = {
            family_seed(7, check, i)
            for check in ("commutator", "reciprocal", "algebra", "interpolation")
            for i in range(50)
        }
        assert len(seeds) == 200

    def test_commutator_family_reproducible(self):
        grid = make_grid(64)
        a = commutator_family_ratios(grid, 10, 7, 1.5, 3.0)
        b = commutator_family_ratios(grid, 10, 7, 1.5, 3.0)
        assert np.array_equal(a, b)
        assert a.shape == (10,)
        assert np.all(a > 0.0)

    def test_refinement_stability(self):
        # members are band-limited to FAMILY_MAX_MODE, so the doubled grid
        # sees the same functions and ratios move only by round-off
        coarse = make_grid(64)
        fine = make_grid(128)
        for sweep, args in [
            (commutator_family_ratios, (1.5, 3.0)),
            (reciprocal_family_ratios, (1.5, 3.0)),
            (algebra_family_ratios, (1.5,)),
        ]:
            base = sweep(coarse, 20, 7, *args)
            refined = sweep(fine, 20, 7, *args)
            assert np.max(np.abs(refined - base) / base) <= 1e-10

    def test_bounded_density_floor(self):
        grid = make_grid(64)
        for seed in range(30):
            rho = _bounded_density(grid, seed, RHO_MAX_MODE, 2.0)
            assert np.min(rho.samples) >= 1.0 - RHO_FLUCTUATION - 1e-12
            assert rho.mean() == pytest.approx(1.0, abs=1e-14)

    def test_interpolation_rows(self):
        grid = make_grid(64)
        rows = interpolation_family_rows(grid, 60, 7, 1.5, 3.0, 4.0)
        assert len(rows) == 60
        probes = [r for r in rows if r["is_probe"]]
        assert len(probes) == 3  # members 0, 25, 50
        for row in probes:
            assert abs(row["gap"]) <= 1e-12 * max(row["norm_s"], 1.0)
        for row in rows:
            assert row["gap"] >= -1e-10 * max(row["norm_s"], 1.0)
            assert row["ratio"] >= 1.0 - 1e-10

    def test_family_max_mode_fits_default_grids(self):
        assert FAMILY_MAX_MODE <= make_grid(64).dealias_cutoff
        assert RHO_MAX_MODE <= make_grid(64).dealias_cutoff
