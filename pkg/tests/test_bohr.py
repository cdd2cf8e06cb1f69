import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_geometry import bohr_eval, map_zero_to_bohr, prime_log_basis, shift_basis
from dirichlet_geometry.bohr import basis_for
from dirichlet_geometry.errors import DimensionMismatch, ValidationError
from dirichlet_geometry.series import GeneralDirichletSeries, dirichlet_series, eval_partial, zeta_series


def ref_partial(coeffs, s, N):
    s = mpmath.mpc(s.real, s.imag)
    return complex(mpmath.fsum(mpmath.mpf(complex(a).real) * mpmath.power(n, -s) for n, a in zip(range(1, N + 1), coeffs)))


@pytest.fixture(scope="module")
def basis200():
    return prime_log_basis(200)


class TestPrimeLogBasis:
    def test_small(self):
        b = prime_log_basis(4)
        assert b.betas == pytest.approx((math.log(2), math.log(3)), abs=0)
        assert b.row(4).tolist() == [2, 0]
        assert b.row(1).tolist() == [0, 0]
        assert b.dimension == 2

    def test_row_twelve(self):
        b = prime_log_basis(20)
        assert b.row(12).tolist()[:3] == [2, 1, 0]
        assert not b.row(12)[2:].any()

    def test_rows_are_factorizations(self):
        b = prime_log_basis(300)
        primes = [int(round(math.exp(x))) for x in b.betas]
        assert primes[:10] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        for n in range(1, 301):
            assert math.prod(p ** int(e) for p, e in zip(primes, b.row(n))) == n

    def test_reconstruction(self):
        b = prime_log_basis(10_000)
        lam = np.log(np.arange(1, 10_001))
        assert b.reconstruction_error(lam) < 1e-14 * math.log(10_000)

    def test_entries_rational_non_negative(self):
        b = prime_log_basis(50)
        for row in b.rows:
            assert all(v >= 0 and v.denominator == 1 for v in row.values())

    def test_n_max_guard(self):
        with pytest.raises(ValidationError):
            prime_log_basis(1)

    def test_row_range(self):
        with pytest.raises(DimensionMismatch):
            prime_log_basis(10).row(11)


class TestShiftBasis:
    def test_rows(self):
        b = shift_basis(5)
        assert b.betas == (1.0,)
        assert [b.row(n)[0] for n in range(1, 6)] == [0, 1, 2, 3, 4]

    def test_basis_for_power_series_exponents(self):
        ser = GeneralDirichletSeries(np.arange(6.0), np.ones(6))
        assert basis_for(ser).kind == "shift"

    def test_basis_for_refuses(self):
        ser = GeneralDirichletSeries([0.0, math.sqrt(2), 3.0], [1.0, 1.0, 1.0])
        with pytest.raises(ValidationError):
            basis_for(ser)


class TestBohrEval:
    def test_identity_against_oracle(self, basis200, rng):
        ser = zeta_series(200)
        for _ in range(20):
            s = complex(rng.uniform(0.5, 3.0), rng.uniform(-30, 30))
            lifted = bohr_eval(ser, basis200, map_zero_to_bohr(s, basis200), 200)
            ref = ref_partial(np.ones(200), s, 200)
            assert abs(lifted - ref) < 1e-12 * max(1.0, abs(ref))
            assert abs(lifted - eval_partial(ser, s, 200)) < 1e-12 * max(1.0, abs(ref))

    def test_identity_at_zero(self, basis200):
        rho = 0.5 + 14.134725141734695j
        ser = zeta_series(200)
        assert abs(bohr_eval(ser, basis200, map_zero_to_bohr(rho, basis200), 200) - eval_partial(ser, rho, 200)) < 1e-12

    def test_period(self, basis200, rng):
        ser = dirichlet_series(rng.normal(size=200))
        for _ in range(5):
            Z = rng.normal(size=basis200.dimension) + 1j * rng.normal(size=basis200.dimension)
            base = bohr_eval(ser, basis200, Z, 200)
            for k in (0, 1, 5, basis200.dimension - 1):
                shifted = Z.copy()
                shifted[k] += 2j * math.pi
                assert abs(bohr_eval(ser, basis200, shifted, 200) - base) < 1e-12 * max(1.0, abs(base))

    def test_independent_coordinates(self):
        # off the diagonal Z = sB the lift is a genuinely different function
        b = prime_log_basis(4)
        ser = zeta_series(4)
        z1, z2 = 0.3 + 1j, 2.0 - 0.5j
        want = 1 + np.exp(-z1) + np.exp(-z2) + np.exp(-2 * z1)
        assert abs(bohr_eval(ser, b, [z1, z2], 4) - want) < 1e-15

    def test_first_term(self, basis200):
        assert bohr_eval(zeta_series(200), basis200, np.zeros(46), 1) == 1

    def test_partial_coordinates(self):
        # rows up to 4 touch only (log 2, log 3)
        b = prime_log_basis(10)
        ser = zeta_series(10)
        assert bohr_eval(ser, b, [0.0, 0.0], 4) == 4
        with pytest.raises(DimensionMismatch):
            bohr_eval(ser, b, [0.0, 0.0], 5)
        with pytest.raises(DimensionMismatch):
            bohr_eval(ser, b, np.zeros(b.dimension + 1), 4)
        with pytest.raises(DimensionMismatch):
            bohr_eval(ser, b, np.zeros(b.dimension), 11)

    def test_shift_basis_identity(self, rng):
        ser = GeneralDirichletSeries(np.arange(30.0), rng.normal(size=30) * 0.5 ** np.arange(30))
        ser = GeneralDirichletSeries(ser.lambdas, np.concatenate([[1.0], ser.coefficients[1:]]))
        b = shift_basis(30)
        for s in rng.uniform(-1, 2, 5) + 1j * rng.uniform(-10, 10, 5):
            assert abs(bohr_eval(ser, b, map_zero_to_bohr(s, b), 30) - eval_partial(ser, s)) < 1e-12


class TestMapZero:
    def test_critical_line(self):
        Z = map_zero_to_bohr(0.5 + 14.134725j, prime_log_basis(4))
        assert Z.real.tolist() == [math.log(2) / 2, math.log(3) / 2]
        assert Z.real[0] == pytest.approx(0.346574, abs=1e-6)
        assert Z.real[1] == pytest.approx(0.549306, abs=1e-6)

    def test_origin(self):
        assert not map_zero_to_bohr(0, prime_log_basis(30)).any()

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-5, 5), st.floats(-100, 100))
    def test_real_parts_scale(self, sigma, t):
        b = prime_log_basis(50)
        Z = map_zero_to_bohr(complex(sigma, t), b)
        assert Z.real.tolist() == [beta * sigma for beta in b.betas]
        assert Z.imag.tolist() == [beta * t for beta in b.betas]

    def test_json(self):
        doc = prime_log_basis(12).to_json()
        assert doc["rows"][11] == {"0": "2", "1": "1"}
        assert doc["kind"] == "prime-log"
