import math
from itertools import combinations

import numpy as np
import pytest

from conftest import ref_zeta_zeros, two_term_series, two_term_zero
from dirichlet_geometry import Rect, count_zeros, delta_components, dirichlet_polynomial_target, probe_symmetric_pair
from dirichlet_geometry.atlas import alternating_rule_check, build_atlas, merge_tree
from dirichlet_geometry.atlas.domains import slit_curves
from dirichlet_geometry.atlas.probe import GAMMA, GAMMA_PRIME
from dirichlet_geometry.errors import ValidationError, WindowTooSmall
from dirichlet_geometry.series import GeneralDirichletSeries


def strip_holding(atlas, t):
    (st,) = [s for s in atlas.strips if any(abs(z.s.imag - t) < 1e-3 for z in s.zeros)]
    return st


def dist_to_segment(w, a, b):
    d = b - a
    u = np.clip(((w - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(w - (a + u * d))


@pytest.fixture(scope="module")
def deltas(zeta, zeta_atlas):
    return delta_components(zeta, zeta_atlas.window, [z.s for z in zeta_atlas.zeros], zeta_atlas.strips)


class TestStrips:
    def test_every_zero_in_one_strip(self, zeta_atlas):
        owned = [z.s for st in zeta_atlas.strips for z in st.zeros]
        assert sorted(owned, key=lambda s: (s.imag, s.real)) == sorted((z.s for z in zeta_atlas.zeros), key=lambda s: (s.imag, s.real))
        assert not any("strips" in n for n in zeta_atlas.notes)

    def test_counts_sum_to_window_total(self, zeta, zeta_atlas):
        # the window is closed: the trivial zeros on t = 0 and on sigma = -10 belong to it
        total = count_zeros(zeta, Rect(-10.5, 12.0, -0.5, 60.0))
        assert sum(st.j_k for st in zeta_atlas.strips) == total == 18

    def test_nontrivial_zeros_match_oracle(self, zeta_atlas):
        ts = [z.s.imag for z in zeta_atlas.zeros if z.kind == "nontrivial"]
        assert ts == pytest.approx(ref_zeta_zeros(60.0), abs=1e-8)

    def test_pole_strip(self, zeta_atlas):
        s0 = zeta_atlas.strip(0)
        assert s0.pole_strip and not s0.complete
        assert sorted(z.s.real for z in s0.zeros) == pytest.approx([-10, -8, -6, -4, -2], abs=1e-10)
        assert all(z.kind == "trivial" for z in s0.zeros)

    def test_strips_ordered_upwards(self, zeta_atlas):
        ks = [st.k for st in zeta_atlas.strips]
        assert ks == sorted(ks) == list(range(len(ks)))
        lows = [min(z.s.imag for z in st.zeros) for st in zeta_atlas.strips[1:]]
        assert lows == sorted(lows)

    def test_derivative_counts(self, zeta_atlas):
        for st in zeta_atlas.strips:
            assert st.derivative_count_ok, st.k

    def test_two_zero_strip(self, zeta_atlas):
        # identified by content: the strip holding the zeros near 21.02 and 25.01
        st = strip_holding(zeta_atlas, 21.022040)
        assert st.complete
        assert st.j_k == 2
        assert [z.s.imag for z in st.zeros] == pytest.approx([21.022040, 25.010858], abs=1e-6)
        (v,) = st.derivative_zeros
        assert v.s.real > 0.5

    def test_first_zeros_are_separated(self, zeta_atlas):
        assert strip_holding(zeta_atlas, 14.134725) is not strip_holding(zeta_atlas, 21.022040)

    def test_summary_rows(self, zeta_atlas):
        rows = zeta_atlas.summary()
        assert [r["j_k"] for r in rows] == [5, 1, 2, 2, 3, 3, 2]
        for r in rows:
            if r["complete"]:
                assert r["deriv"] == r["merge_internal"] == r["j_k"] - 1
                assert r["domains"] == r["j_k"]
                assert r["windings"] == [1] * r["j_k"]

    def test_boundaries_recorded(self, zeta_atlas):
        for st in zeta_atlas.strips:
            if st.complete:
                assert (st.lower, st.upper) == (st.k, st.k + 1)
        assert zeta_atlas.gamma_prime_crossings == []

    def test_gamma_k0_assigned(self, zeta_atlas):
        for st in zeta_atlas.strips[1:]:
            cur = zeta_atlas.gamma[st.gamma_k0]
            assert cur.meta["covers"] == "(-inf, 1)"
            assert any(abs(complex(*cur.meta["seed"]) - z.s) == 0 for z in st.zeros)

    def test_curve_residuals(self, zeta_atlas):
        for cur in zeta_atlas.gamma_prime + zeta_atlas.gamma:
            assert cur.max_residual < 1e-9

    def test_grh_desk_check(self, zeta_atlas):
        nontrivial = [z for z in zeta_atlas.zeros if z.kind == "nontrivial"]
        assert len(nontrivial) == 13
        assert max(abs(z.s.real - 0.5) for z in nontrivial) < 1e-8

    def test_window_too_small(self, zeta):
        with pytest.raises(WindowTooSmall):
            build_atlas(zeta, Rect(0.0, 3.0, 15.0, 16.0), with_domains=False, with_rules=False)

    def test_needs_leading_term(self):
        from dirichlet_geometry.targets import polynomial_target

        with pytest.raises(ValidationError):
            build_atlas(polynomial_target([1.0, 1.0]), Rect(-1, 1, -1, 1))

    def test_json_round_trip(self, zeta_atlas):
        import json

        doc = json.loads(json.dumps(zeta_atlas.to_json()))
        assert len(doc["strips"]) == len(zeta_atlas.strips)
        assert doc["summary"][2]["j_k"] == 2


class TestMergeTree:
    def test_two_zero_strip(self, zeta_atlas):
        tree = strip_holding(zeta_atlas, 21.022040).merge_tree
        assert not tree.partial
        assert len(tree.leaves) == 2 and len(tree.internal) == 1
        (node,) = tree.internal
        assert node.v == pytest.approx(2.46316186945 + 23.29832049276j, abs=1e-8)
        assert sorted(z.imag for z in node.descended_to) == pytest.approx([21.022040, 25.010858], abs=1e-6)
        assert tree.root == node.id

    def test_single_zero_strip_is_a_leaf(self, zeta_atlas):
        tree = strip_holding(zeta_atlas, 14.134725).merge_tree
        assert tree.internal == [] and len(tree.leaves) == 1

    def test_all_trees(self, zeta_atlas):
        for st in zeta_atlas.strips:
            tree = st.merge_tree
            assert not tree.partial, st.k
            assert len(tree.internal) == len(tree.leaves) - 1
            assert tree.r_increasing()
            assert tree.root is not None

    def test_node_radius_is_modulus_at_v(self, zeta, zeta_atlas):
        for st in zeta_atlas.strips:
            for n in st.merge_tree.internal:
                assert n.r == pytest.approx(abs(zeta.eval(n.v)), rel=1e-12)

    def test_three_zero_strip_joins_everything(self, zeta_atlas):
        tree = strip_holding(zeta_atlas, 40.918719).merge_tree
        by_id = {n.id: n for n in tree.nodes}

        def under(i):
            n = by_id[i]
            return {n.zero} if n.is_leaf else set().union(*(under(c) for c in n.children))

        assert under(tree.root) == {z.zero for z in tree.leaves}

    def test_two_term_has_no_internal_nodes(self, two_term):
        zs = [two_term_zero(k) for k in range(-1, 2)]
        tree = merge_tree(two_term, zs, [], Rect(-3, 3, -15, 15))
        assert tree.internal == [] and len(tree.leaves) == 3


class TestDomains:
    def test_two_zero_strip(self, zeta_atlas):
        st = strip_holding(zeta_atlas, 21.022040)
        assert len(st.domains) == 2
        assert all(d.winding_check == 1 and d.contained_zero is not None for d in st.domains)
        assert {d.contained_zero for d in st.domains} == {z.s for z in st.zeros}

    def test_single_zero_strip_is_one_domain(self, zeta_atlas):
        st = strip_holding(zeta_atlas, 14.134725)
        (d,) = st.domains
        assert d.polygon.symmetric_difference(st.polygon).area < 1e-9 * st.polygon.area

    def test_domains_partition_strips(self, zeta_atlas):
        for st in zeta_atlas.strips:
            if not st.domains:
                continue
            for a, b in combinations(st.domains, 2):
                assert a.polygon.intersection(b.polygon).area < 1e-9
            assert sum(d.polygon.area for d in st.domains) == pytest.approx(st.polygon.area, rel=1e-9)

    def test_slits_map_onto_segment(self, zeta, zeta_atlas):
        st = strip_holding(zeta_atlas, 21.022040)
        (v,) = st.derivative_zeros
        fv = zeta.eval(v.s)
        slits = slit_curves(zeta, [v.s], zeta_atlas.window)
        arcs = [c for c in slits.curves if c.tag == "eta"]
        assert len(arcs) == 2
        for arc in arcs:
            w = np.asarray(zeta.eval(arc.s[1:]))
            assert np.max(dist_to_segment(w, fv, 1.0) / np.maximum(1.0, np.abs(w))) < 1e-9

    def test_pole_strip_has_no_domains(self, zeta_atlas):
        s0 = zeta_atlas.strip(0)
        assert s0.domains == []
        assert any("pole strip" in n for n in s0.notes)


class TestRules:
    def test_alternation_at_every_zero(self, zeta_atlas):
        reps = [a for st in zeta_atlas.strips for a in st.alternation]
        assert len(reps) == len(zeta_atlas.zeros)
        for rep in reps:
            assert rep.holds, rep.to_json()
            assert rep.alternations == 2 * rep.multiplicity

    def test_first_zero_sequence(self, zeta):
        rep = alternating_rule_check(zeta, 0.5 + 14.134725141734695j, 0.05)
        assert rep.radius == 0.05 and rep.winding == 1
        assert (rep.n_a, rep.n_b) == (1, 1)
        assert rep.alternations == 2

    def test_alternation_brute_force(self, zeta):
        # independent sweep of the colours on 4096 samples
        z = 0.5 + 14.134725141734695j
        theta = 2 * math.pi * np.arange(4096) / 4096
        vals = np.asarray(zeta.eval(z + 0.05 * np.exp(1j * theta)))
        flips = np.nonzero(np.sign(vals.imag) != np.sign(np.roll(vals.imag, -1)))[0]
        colours = ["a" if vals[i].real < 0 else "b" for i in flips]
        assert sorted(colours) == ["a", "b"]
        rep = alternating_rule_check(zeta, z, 0.05)
        assert sorted(rep.sequence) == sorted(colours)

    def test_two_term(self, two_term):
        rep = alternating_rule_check(two_term, two_term_zero(0), 0.1)
        assert rep.holds and rep.alternations == 2

    def test_double_zero(self):
        f = dirichlet_polynomial_target(GeneralDirichletSeries([0.0, math.log(2), math.log(4)], [1.0, -2.0, 1.0]))
        rep = alternating_rule_check(f, 0.0, 0.1, multiplicity=2)
        assert rep.winding == 2
        assert (rep.n_a, rep.n_b) == (2, 2)
        assert rep.alternations == 4 and rep.holds

    def test_radius_is_shrunk(self, zeta):
        # radius 5 around the zero at 21.02 also encloses the one at 25.01
        rep = alternating_rule_check(zeta, 0.5 + 21.022039638771555j, 5.0)
        assert rep.radius < 5.0 and rep.winding == 1

    def test_matching(self, zeta_atlas):
        rep = zeta_atlas.matching
        assert rep.findings
        assert rep.violations == []
        assert rep.max_tangent_residual < 1e-2
        for f in rep.findings:
            assert f.status in ("allowed", "exception")
            if f.status == "exception":
                assert (f.gamma_color, f.upsilon_color) == ("b", "d") and f.s.real > 0.5

    def test_matching_points_are_real_for_both(self, zeta, zeta_atlas):
        for f in zeta_atlas.matching.findings:
            v, d = zeta.jet(f.s, 1)
            assert abs(v.imag) < 1e-9 * max(1.0, abs(v))
            assert abs(d.imag) < 1e-9 * max(1.0, abs(d))


class TestDelta:
    def test_four_unbounded_components(self, deltas):
        unbounded = [d for d in deltas if d.window_unbounded]
        assert len(unbounded) >= 4

    def test_exit_through_right_edge(self, deltas):
        for d in deltas:
            if d.window_unbounded:
                assert d.exit_ok
                assert d.gamma_k0.termination.edge == "right"
                assert d.exit_bound == pytest.approx(2 * 2.0 ** -11)

    def test_between_consecutive_gamma_primes(self, deltas, zeta_atlas):
        for d in deltas:
            if d.window_unbounded and d.strip not in (None, 0):
                st = zeta_atlas.strip(d.strip)
                assert set(d.level.zeros) <= {z.s for z in st.zeros}

    def test_bounded_component_has_no_exit(self, deltas):
        bounded = [d for d in deltas if not d.window_unbounded]
        for d in bounded:
            assert d.gamma_k0 is None and not d.exit_ok

    def test_two_term_components(self, two_term):
        window = Rect(-3.0, 6.0, 0.0, 20.0)
        zs = [two_term_zero(k) for k in range(0, 2)]
        out = delta_components(two_term, window, zs)
        # one cell of |1 + 2^-s| < 1 per zero, each opening out to sigma = +inf
        assert len(out) == 2
        for d in out:
            assert len(d.level.zeros) == 1
            assert d.window_unbounded and d.exit_ok


class TestProbe:
    def test_degenerate(self, zeta, two_term):
        for target in (zeta, two_term):
            assert probe_symmetric_pair(target, 0.5, 7.0).verdict == "degenerate"

    def test_zeta_identity(self, zeta):
        rep = probe_symmetric_pair(zeta, 0.3, 14.134725)
        assert rep.relative_residual < 1e-6
        assert rep.s1 == 0.3 + 14.134725j and rep.s2 == pytest.approx(0.7 + 14.134725j)

    def test_zeta_crossing_at_the_zero(self, zeta):
        # the segment runs through rho = 1/2 + i t: z(lam) passes through 0 at lam = 1/2
        rep = probe_symmetric_pair(zeta, 0.3, 14.134725141734695)
        hits = [e for e in rep.crossing_events if e.which == GAMMA]
        assert any(abs(e.lam - 0.5) < 1e-9 and abs(e.value) < 1e-8 for e in hits)
        assert rep.verdict == "consistent"

    def test_crossings_against_brute_force(self, zeta, rng):
        for _ in range(3):
            sigma, t = rng.uniform(0.05, 0.45), rng.uniform(5, 50)
            rep = probe_symmetric_pair(zeta, sigma, t, 1000)
            for which, vals in ((GAMMA, rep.z), (GAMMA_PRIME, rep.Z)):
                flips = int(np.sum(np.sign(vals.imag[:-1]) * np.sign(vals.imag[1:]) < 0))
                assert sum(1 for e in rep.crossing_events if e.which == which) == flips
            for e in rep.crossing_events:
                s = rep.s1 + e.lam * (rep.s2 - rep.s1)
                val = zeta.eval(s) if e.which == GAMMA else zeta.deriv(s)
                assert abs(val.imag) < 1e-9 * max(1, abs(val))

    def test_swap(self, zeta):
        a = probe_symmetric_pair(zeta, 0.8, 10.0)
        b = probe_symmetric_pair(zeta, 0.2, 10.0)
        assert a.swapped and not b.swapped
        assert a.s1 == pytest.approx(b.s1) and a.identity_residual == pytest.approx(b.identity_residual)

    def test_two_term_closed_form(self, two_term, rng):
        # Im f = -2^-sigma sin(t ln 2) keeps its sign along a horizontal segment
        for t in rng.uniform(-20, 20, 5):
            rep = probe_symmetric_pair(two_term, 0.25, t)
            assert rep.crossing_events == [] and rep.on_axis == []
            assert rep.relative_residual < 1e-6
        rep = probe_symmetric_pair(two_term, 0.25, math.pi / math.log(2))
        assert rep.crossing_events == []
        assert rep.on_axis == [GAMMA, GAMMA_PRIME]
        lam = rep.lam
        s = rep.s1 + lam * (rep.s2 - rep.s1)
        assert np.allclose(rep.z, 1 - 2.0 ** -s.real, atol=1e-14)
        assert rep.verdict == "consistent"

    @pytest.mark.parametrize("sigma", [0.0, 1.0, -0.3])
    def test_bad_sigma(self, zeta, sigma):
        with pytest.raises(ValidationError):
            probe_symmetric_pair(zeta, sigma, 1.0)

    def test_json(self, zeta):
        doc = probe_symmetric_pair(zeta, 0.3, 14.134725, 50).to_json()
        assert len(doc["lambda"]) == 51 and doc["verdict"] == "consistent"


def test_two_term_atlas():
    f = dirichlet_polynomial_target(two_term_series())
    atlas = build_atlas(f, Rect(-3.0, 4.0, -1.0, 20.0))
    complete = [st for st in atlas.strips if st.complete]
    assert complete
    for st in complete:
        assert st.j_k == 1 and st.derivative_zeros == []
        assert len(st.domains) == 1 and st.domains[0].winding_check == 1
        (z,) = st.zeros
        k = round((z.s.imag * math.log(2) / math.pi - 1) / 2)
        assert abs(z.s - two_term_zero(k)) < 1e-10
