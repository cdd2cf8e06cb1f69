import cmath
import math

import mpmath
import numpy as np
import pytest

from conftest import ref_l_chi4, ref_multiplier, ref_zeta, ref_zeta_deriv_real_zero, two_term_series
from dirichlet_geometry.characters import dirichlet_character, dirichlet_characters
from dirichlet_geometry.errors import AccuracyWindowExceeded, NotNormalized, PoleAt1
from dirichlet_geometry.gamma import loggamma
from dirichlet_geometry.series import GeneralDirichletSeries, eval_partial, tail_bound, zeta_series
from dirichlet_geometry.targets import (
    dirichlet_l,
    dirichlet_l_target,
    dirichlet_polynomial_target,
    riemann_zeta,
    riemann_zeta_deriv,
    riemann_zeta_deriv2,
    zeta_multiplier,
    zeta_target,
)


def richardson(f, s, h=1e-5):
    d1 = (f(s + h) - f(s - h)) / (2 * h)
    d2 = (f(s + h / 2) - f(s - h / 2)) / h
    return (4 * d2 - d1) / 3


def random_points(rng, n, sig=(-3.0, 4.0), t=30.0, avoid=()):
    out = []
    while len(out) < n:
        s = complex(rng.uniform(*sig), rng.uniform(-t, t))
        if all(abs(s - a) > 1.0 for a in avoid):
            out.append(s)
    return out


class TestZeta:
    @pytest.mark.parametrize("s", [2.0, 0.0, -1.0, 0.5 + 3j, -7.5 + 40j, 3 - 110j, 11.9 + 0.5j, -11.5 + 1j])
    def test_against_oracle(self, s):
        ref = ref_zeta(complex(s))
        # absolute below |zeta| = 1, relative above (|zeta| reaches 1e6 on the left)
        assert abs(riemann_zeta(s) - ref) < 1e-10 * max(1.0, abs(ref))

    def test_known_values(self):
        assert riemann_zeta(2.0) == pytest.approx(1.6449340668482264, abs=1e-12)
        assert riemann_zeta(0.0) == pytest.approx(-0.5, abs=1e-12)
        assert riemann_zeta(-1.0) == pytest.approx(-1 / 12, abs=1e-10)

    def test_first_zero(self):
        assert abs(riemann_zeta(0.5 + 14.134725141734695j)) < 1e-9

    def test_pole(self):
        with pytest.raises(PoleAt1):
            riemann_zeta(1.0)
        with pytest.raises(PoleAt1):
            riemann_zeta(1 + 5e-13j)

    @pytest.mark.parametrize("s", [-12.5, 2 + 121j, -3 - 130j])
    def test_window_guard(self, s):
        with pytest.raises(AccuracyWindowExceeded):
            riemann_zeta(s)

    def test_array_input(self):
        s = np.array([2.0, 3.0, 0.5 + 10j])
        out = riemann_zeta(s)
        assert out.shape == (3,)
        assert out[2] == riemann_zeta(0.5 + 10j)

    def test_conjugate_symmetry(self, rng):
        for s in random_points(rng, 30, avoid=(1,)):
            assert abs(riemann_zeta(s.conjugate()) - riemann_zeta(s).conjugate()) < 1e-12

    def test_limit_at_sigma_30(self, rng):
        bound = 2.0**-30 * 4 * (math.pi**2 / 6 - 1)
        for t in rng.uniform(-100, 100, 20):
            assert abs(riemann_zeta(complex(30, t)) - 1) <= bound

    def test_tail_bound_on_continued_function(self, rng):
        ser = zeta_series(10_000)
        for sigma in (3.0, 8.0, 20.0):
            bound = tail_bound(ser, sigma, 2.0)
            for t in rng.uniform(-100, 100, 5):
                assert abs(riemann_zeta(complex(sigma, t)) - 1) <= bound


class TestZetaDerivatives:
    def test_deriv_at_zero(self):
        assert riemann_zeta_deriv(0.0) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-12)
        assert abs(riemann_zeta_deriv(0.0) - ref_zeta(0.0, 1)) < 1e-9

    def test_deriv_at_two_matches_richardson(self):
        assert abs(riemann_zeta_deriv(2.0) - richardson(riemann_zeta, 2.0)) < 1e-8

    def test_first_real_zero_of_deriv(self):
        v = ref_zeta_deriv_real_zero()
        assert v == pytest.approx(-2.7172628292, abs=1e-9)
        assert abs(riemann_zeta_deriv(v)) < 1e-9

    @pytest.mark.parametrize("s", [0.5 + 14j, -5 + 20j, 3 + 50j, -10.5 + 2j])
    def test_against_oracle(self, s):
        assert abs(riemann_zeta_deriv(s) - ref_zeta(s, 1)) < 1e-9 * max(1, abs(ref_zeta(s, 1)))
        assert abs(riemann_zeta_deriv2(s) - ref_zeta(s, 2)) < 1e-9 * max(1, abs(ref_zeta(s, 2)))

    def test_finite_differences(self, rng):
        for target in (zeta_target(), dirichlet_l_target(dirichlet_character(4, 1)), dirichlet_polynomial_target(two_term_series())):
            for s in random_points(rng, 50, sig=(-0.5, 4.0), avoid=(1,)):
                d = target.deriv(s)
                assert abs(d - richardson(target.eval, s)) <= 1e-7 * max(1.0, abs(d))
                d2 = target.deriv2(s)
                assert abs(d2 - richardson(target.deriv, s)) <= 1e-7 * max(1.0, abs(d2))


class TestMultiplier:
    def test_trivial_zero(self):
        assert zeta_multiplier(-2.0) == 0

    def test_unit_modulus_on_critical_line(self):
        assert abs(abs(zeta_multiplier(0.5 + 10j)) - 1) < 1e-8

    @pytest.mark.parametrize("s", [0.3 + 2j, -2.5 + 7j, 3.5 - 20j])
    def test_against_oracle(self, s):
        ref = ref_multiplier(s)
        assert abs(zeta_multiplier(s) - ref) < 1e-10 * max(1, abs(ref))

    def test_functional_equation_point(self):
        s = 0.3 + 2j
        lhs = riemann_zeta(s)
        rhs = zeta_multiplier(s) * riemann_zeta((1 - s.conjugate())).conjugate()
        assert abs(lhs - rhs) < 1e-8

    def test_functional_equation_random(self, rng):
        guards = [1.0, 0.0] + [-2.0 * k for k in range(1, 3)]
        for s in random_points(rng, 100, avoid=guards):
            assert abs(riemann_zeta(s) - zeta_multiplier(s) * riemann_zeta(1 - s)) < 1e-8

    def test_trivial_zero_set(self):
        zs = zeta_target().multiplier_zeros(-7.0, 1.0)
        assert zs == [-2, -4, -6]


class TestGamma:
    @pytest.mark.parametrize("z", [0.5, 3.25 + 1j, -2.5 + 0.5j, 1e-3 + 40j, 12 - 60j])
    def test_loggamma_against_oracle(self, z):
        ref = complex(mpmath.loggamma(mpmath.mpc(complex(z).real, complex(z).imag)))
        got = complex(loggamma(complex(z)))
        # compare modulo 2 pi i, branch conventions may differ
        diff = got - ref
        assert abs(diff.real) < 1e-12 * max(1, abs(ref))
        k = round(diff.imag / (2 * math.pi))
        assert abs(diff.imag - 2 * math.pi * k) < 1e-11 * max(1, abs(ref))


class TestCharacters:
    def test_chi4(self):
        chi = dirichlet_character(4, 1)
        assert chi.values.tolist() == [0, 1, 0, -1]
        assert not chi.is_principal

    @pytest.mark.parametrize("q", [1, 3, 4, 5, 7, 8, 12])
    def test_character_axioms(self, q):
        chars = dirichlet_characters(q)
        phi = sum(1 for a in range(q) if math.gcd(a, q) == 1)
        assert len(chars) == phi
        for chi in chars:
            v = chi.values
            for a in range(q):
                if math.gcd(a, q) != 1:
                    assert v[a] == 0
                    continue
                assert abs(v[a] ** phi - 1) < 1e-12
                for b in range(q):
                    if math.gcd(b, q) == 1:
                        assert abs(v[a * b % q] - v[a] * v[b]) < 1e-12
        assert sum(1 for c in chars if c.is_principal) == 1

    def test_orthogonality(self):
        chars = dirichlet_characters(12)
        m = np.array([c.values for c in chars])
        gram = m @ m.conj().T
        assert np.allclose(gram, 4 * np.eye(len(chars)), atol=1e-12)


class TestDirichletL:
    def test_catalan(self):
        chi = dirichlet_character(4, 1)
        assert dirichlet_l(2.0, chi) == pytest.approx(float(mpmath.catalan), abs=1e-12)
        assert abs(dirichlet_l(2.0, chi) - ref_l_chi4(2)) < 1e-10

    def test_value_at_one(self):
        assert dirichlet_l(1.0, dirichlet_character(4, 1)) == pytest.approx(math.pi / 4, abs=1e-10)

    @pytest.mark.parametrize("s", [0.5 + 6.0209489046975965j, -0.7 + 15j, 2 - 40j])
    def test_chi4_against_oracle(self, s):
        assert abs(dirichlet_l(s, dirichlet_character(4, 1)) - ref_l_chi4(mpmath.mpc(s.real, s.imag))) < 1e-9

    def test_complex_character_against_oracle(self):
        chi = dirichlet_character(5, 1)
        s = 0.5 + 9j
        ref = complex(mpmath.dirichlet(mpmath.mpc(s.real, s.imag), [complex(v) for v in chi.values]))
        assert abs(dirichlet_l(s, chi) - ref) < 1e-9

    def test_principal_mod_one_is_zeta(self, rng):
        chi = dirichlet_character(1, 0)
        for s in random_points(rng, 20, sig=(-1.0, 4.0), avoid=(1,)):
            assert abs(dirichlet_l(s, chi) - riemann_zeta(s)) < 1e-10

    def test_principal_pole(self):
        with pytest.raises(PoleAt1):
            dirichlet_l(1.0, dirichlet_character(4, 0))


class TestDirichletPolynomial:
    def test_two_term_closed_forms(self):
        f = dirichlet_polynomial_target(two_term_series())
        assert f.eval(0.0) == 2
        assert f.deriv(0.0) == pytest.approx(-math.log(2), abs=1e-15)
        s = 0.3 - 2j
        assert abs(f.deriv(s) + math.log(2) * 2**-s) < 1e-15
        assert f.poles == () and f.multiplier is None

    def test_two_term_zero(self):
        f = dirichlet_polynomial_target(two_term_series())
        z = 1j * math.pi / math.log(2)
        assert z.imag == pytest.approx(4.532360141827194, abs=1e-14)
        assert abs(f.eval(z)) < 1e-15

    def test_matches_eval_partial(self, rng):
        ser = GeneralDirichletSeries(
            [0.0, 0.3, 1.1, 2.0, 2.0, 3.7], [1, 2 - 1j, 0.5j, -1, 0.25, 3], "poly"
        )
        f = dirichlet_polynomial_target(ser)
        for s in rng.uniform(-3, 3, 20) + 1j * rng.uniform(-30, 30, 20):
            assert abs(f.eval(s) - eval_partial(ser, s)) < 1e-13 * max(1, abs(f.eval(s)))

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            dirichlet_polynomial_target(GeneralDirichletSeries([0.0, 1.0], [2.0, 1.0]))

    def test_conjugate_symmetry(self, rng):
        f = dirichlet_polynomial_target(two_term_series())
        for s in rng.uniform(-3, 3, 10) + 1j * rng.uniform(-30, 30, 10):
            assert abs(f.eval(s.conjugate()) - f.eval(s).conjugate()) < 1e-12

    def test_seed_data(self):
        f = dirichlet_polynomial_target(GeneralDirichletSeries([0.0, math.log(3)], [1, 3j]))
        assert f.lambda2 == pytest.approx(math.log(3))
        assert cmath.phase(f.a2) == pytest.approx(math.pi / 2)
