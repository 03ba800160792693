import math

import numpy as np
import pytest

from conftest import random_recipes
from wvlab.packets import (
    ComplexGaussian,
    PacketRecipe,
    PhysicalConstants,
    f_pair_overlap,
    fourier_transform,
    free_evolve,
    galilean_boost,
    inner_product,
    inverse_fourier_transform,
    make_f,
    make_g,
    momentum_moment,
    reflect,
    translate,
)


def coefficient_drift(p, q):
    return max(abs(p.a - q.a), abs(p.b - q.b), abs(p.c - q.c))


class TestConstructors:
    def test_f_plus_moments(self, p1):
        f = make_f(p1, +1)
        assert f.mean_position == pytest.approx(0.0, abs=1e-14)
        assert f.mean_wavenumber == pytest.approx(6.0, abs=1e-13)
        assert f.position_variance == pytest.approx(1.0 / (4 * 0.1 ** 2), rel=1e-13)

    def test_f_minus_mean_wavenumber(self, p1):
        assert make_f(p1, -1).mean_wavenumber == pytest.approx(4.0, abs=1e-13)

    def test_g_moments(self, p1):
        g = make_g(p1)
        assert g.mean_position == pytest.approx(100.0, rel=1e-13)
        assert g.mean_wavenumber == pytest.approx(0.0, abs=1e-12)
        assert g.position_variance == pytest.approx(25.0, rel=1e-13)

    @pytest.mark.parametrize("recipe", random_recipes(30))
    def test_unit_norm(self, recipe):
        for packet in (make_f(recipe, +1), make_f(recipe, -1), make_g(recipe)):
            assert abs(packet.norm - 1.0) < 1e-12

    def test_bad_sign_rejected(self, p1):
        with pytest.raises(ValueError):
            make_f(p1, 2)

    def test_zero_x0_rejected(self):
        with pytest.raises(ValueError):
            PacketRecipe(k0=5.0, k1=1.0, dk_f=0.1, dk_g=0.1, x0=0.0)

    def test_nonnormalizable_rejected(self):
        with pytest.raises(ValueError):
            ComplexGaussian(a=0.01, b=0.0, c=0.0)

    def test_separation_ratio(self, p1):
        assert p1.separation_ratio == pytest.approx(20.0)


class TestInnerProduct:
    def test_pair_overlap_value(self, p2):
        # exp(-k1^2 / (2 dk_f^2)) at k1 = 1, dk_f = 0.5
        got = inner_product(make_f(p2, +1), make_f(p2, -1))
        assert got == pytest.approx(0.1353352832366127, abs=1e-15)
        assert abs(got.imag) < 1e-15

    @pytest.mark.parametrize("recipe", random_recipes(50, seed=11))
    def test_pair_overlap_closed_form(self, recipe):
        got = inner_product(make_f(recipe, +1), make_f(recipe, -1))
        assert abs(got - f_pair_overlap(recipe)) < 1e-12

    def test_self_overlap(self, p1):
        assert inner_product(make_f(p1, +1), make_f(p1, +1)) == pytest.approx(1.0, abs=1e-13)

    def test_f_g_negligible(self, p1):
        # The groups are both spatially and spectrally separated; the grid
        # quadrature oracle puts this overlap at ~2.5e-38.
        assert abs(inner_product(make_f(p1, +1), make_g(p1))) < 1e-10

    @pytest.mark.parametrize("recipe", random_recipes(20, seed=3))
    def test_hermiticity(self, recipe):
        lhs = inner_product(make_f(recipe, +1), make_g(recipe))
        rhs = inner_product(make_g(recipe), make_f(recipe, +1))
        assert abs(lhs - rhs.conjugate()) < 1e-14


class TestMomentumMoments:
    def test_mean_momentum(self, p1):
        f = make_f(p1, +1)
        assert momentum_moment(f, f, 1) == pytest.approx(6.0, abs=1e-12)

    def test_second_moment_f(self, p1):
        # (k0 + k1)^2 + dk_f^2; grid oracle gives 36.009999999999984.
        f = make_f(p1, +1)
        assert momentum_moment(f, f, 2) == pytest.approx(36.01, rel=1e-12)

    def test_second_moment_g(self, p1):
        g = make_g(p1)
        assert momentum_moment(g, g, 2) == pytest.approx(0.01, abs=1e-13)

    def test_hbar_scaling(self, p1):
        f = make_f(p1, +1)
        consts = PhysicalConstants(hbar=2.0, mass=3.0)
        assert momentum_moment(f, f, 1, consts) == pytest.approx(12.0, abs=1e-12)
        assert momentum_moment(f, f, 2, consts) == pytest.approx(4 * 36.01, rel=1e-12)

    @pytest.mark.parametrize("recipe", random_recipes(20, seed=5))
    def test_first_moment_real(self, recipe):
        for packet in (make_f(recipe, +1), make_g(recipe)):
            assert abs(momentum_moment(packet, packet, 1).imag) < 1e-12

    def test_bad_power(self, p1):
        f = make_f(p1, +1)
        with pytest.raises(ValueError):
            momentum_moment(f, f, 3)


class TestFourier:
    def test_f_transform_center_and_spread(self, p1):
        tilde = fourier_transform(make_f(p1, +1))
        assert tilde.mean_position == pytest.approx(6.0, rel=1e-12)
        assert tilde.position_variance == pytest.approx(0.01, rel=1e-12)

    def test_g_transform_phase_slope(self, p1):
        # The resting packet picks up a linear phase whose slope magnitude
        # is the packet center.
        tilde = fourier_transform(make_g(p1))
        assert abs(tilde.b.imag) == pytest.approx(100.0, rel=1e-12)
        assert tilde.mean_position == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("recipe", random_recipes(20, seed=7))
    def test_roundtrip(self, recipe):
        for packet in (make_f(recipe, +1), make_g(recipe)):
            back = inverse_fourier_transform(fourier_transform(packet))
            assert coefficient_drift(back, packet) < 1e-12


class TestFreeEvolution:
    def test_resting_packet_stays(self, p1):
        g = make_g(p1)
        evolved = free_evolve(g, 37.0)
        assert evolved.mean_position == pytest.approx(100.0, rel=1e-12)
        assert abs(evolved.norm - 1.0) < 1e-12

    def test_drift(self, p1):
        evolved = free_evolve(make_f(p1, +1), 10.0)
        assert evolved.mean_position == pytest.approx(60.0, rel=1e-12)

    def test_width_growth_closed_form(self, p1):
        # sigma(t)^2 = sigma0^2 (1 + (2 hbar dk^2 t / m)^2)
        t = 25.0
        evolved = free_evolve(make_f(p1, +1), t)
        sigma0_sq = 1.0 / (4 * p1.dk_f ** 2)
        expected = sigma0_sq * (1.0 + (2 * p1.dk_f ** 2 * t) ** 2)
        assert evolved.position_variance == pytest.approx(expected, rel=1e-12)

    def test_backward_is_inverse(self, p1):
        f = make_f(p1, +1)
        back = free_evolve(free_evolve(f, 12.5), -12.5)
        assert coefficient_drift(back, f) < 1e-12

    def test_norm_preserved(self, p1):
        assert abs(free_evolve(make_f(p1, -1), 200.0).norm - 1.0) < 1e-12


class TestBoostAndReflect:
    def test_boost_shifts_velocity(self, p1):
        boosted = galilean_boost(make_f(p1, +1), 3.0)
        assert boosted.mean_velocity() == pytest.approx(3.0, abs=1e-12)

    def test_boost_zero_identity(self, p1):
        f = make_f(p1, +1)
        assert coefficient_drift(galilean_boost(f, 0.0), f) == 0.0

    def test_boost_group_inverse(self, p1):
        f = make_f(p1, +1)
        back = galilean_boost(galilean_boost(f, 2.7), -2.7)
        assert coefficient_drift(back, f) < 1e-12

    def test_boost_preserves_density(self, p1):
        f = make_f(p1, +1)
        boosted = galilean_boost(f, 5.0)
        x = np.linspace(-20, 20, 101)
        assert np.abs(boosted(x)) == pytest.approx(np.abs(f(x)), rel=1e-12)

    def test_translate(self, p1):
        shifted = translate(make_f(p1, +1), 7.0)
        assert shifted.mean_position == pytest.approx(7.0, rel=1e-12)
        assert abs(shifted.norm - 1.0) < 1e-12

    def test_static_reflection(self, p1):
        f = make_f(p1, +1)
        refl = reflect(f, 10.0)
        assert refl.mean_position == pytest.approx(20.0, rel=1e-12)
        assert refl.mean_wavenumber == pytest.approx(-6.0, rel=1e-12)

    def test_moving_mirror_velocity_rule(self, p1):
        # kick = 2 m u / hbar realizes v -> 2u - v
        f = make_f(p1, +1)
        u = 3.0
        refl = reflect(f, 0.0, wavenumber_kick=2 * u)
        assert refl.mean_velocity() == pytest.approx(2 * u - 6.0, abs=1e-12)

    def test_reflection_involution(self, p1):
        f = free_evolve(make_f(p1, +1), 4.0)  # chirped
        center = f.mean_position
        twice = reflect(reflect(f, center, 6.0), center, 6.0)
        assert coefficient_drift(twice, f) < 1e-12
