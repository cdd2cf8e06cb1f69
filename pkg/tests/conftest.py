"""Shared oracles and fixtures.

Reference values come from mpmath at 30 digits and never from the package
under test.  The zeta atlas on [-10, 12] x [0, 60] takes most of a minute, so
it is built once per session.
"""

import math
import time

import mpmath
import numpy as np
import pytest

from dirichlet_geometry import Rect, build_atlas, dirichlet_polynomial_target, zeta_target
from dirichlet_geometry.series import GeneralDirichletSeries

mpmath.mp.dps = 30

ATLAS_WINDOW = Rect(-10.0, 12.0, 0.0, 60.0)


# ---------------------------------------------------------------- oracles


def ref_zeta(s, derivative=0):
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag) if isinstance(s, complex) else s, derivative=derivative))


def ref_zeta_zeros(t_max):
    """Ordinates of the nontrivial zeros with 0 < t < t_max."""
    out, n = [], 1
    while True:
        t = float(mpmath.zetazero(n).imag)
        if t >= t_max:
            return out
        out.append(t)
        n += 1


def ref_zeta_deriv_real_zero():
    """First real zero of zeta' on (-3, -2)."""
    return float(mpmath.findroot(lambda x: mpmath.zeta(x, derivative=1), (-3, -2), solver="bisect"))


def ref_multiplier(s):
    s = mpmath.mpc(s.real, s.imag)
    return complex(2**s * mpmath.pi ** (s - 1) * mpmath.sin(mpmath.pi * s / 2) * mpmath.gamma(1 - s))


def ref_l_chi4(s):
    return complex(mpmath.dirichlet(s, [0, 1, 0, -1]))


# ---------------------------------------------------------------- targets


def two_term_series():
    return GeneralDirichletSeries([0.0, math.log(2)], [1.0, 1.0], "1+2^-s")


def two_term_zero(k):
    return complex(0.0, (2 * k + 1) * math.pi / math.log(2))


@pytest.fixture(scope="session")
def zeta():
    return zeta_target()


@pytest.fixture(scope="session")
def two_term():
    return dirichlet_polynomial_target(two_term_series())


@pytest.fixture(scope="session")
def zeta_atlas_timed(zeta):
    t0 = time.perf_counter()
    atlas = build_atlas(zeta, ATLAS_WINDOW)
    return atlas, time.perf_counter() - t0


@pytest.fixture(scope="session")
def zeta_atlas(zeta_atlas_timed):
    return zeta_atlas_timed[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def cli_atlas_run(tmp_path_factory):
    """One run of the atlas command on ATLAS_WINDOW: (output dir, exit code)."""
    from dirichlet_geometry.cli import main

    out = tmp_path_factory.mktemp("atlas_run")
    w = ATLAS_WINDOW
    code = main(["atlas", "--target", "zeta", "--window", f"{w.sigma_min},{w.sigma_max},{w.t_min},{w.t_max}", "--out", str(out)])
    return out, code


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
