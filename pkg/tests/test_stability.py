import math

import numpy as np
import pytest

from offdiag.lattice import LatticeSequence, LocalizedMatrix, Window, generate
from offdiag.muckenhoupt import WeightSequence
from offdiag.stability import (PartitionOperator, boundedness_check,
                               commutator_diagnostic, cross_stability_verdicts,
                               effective_bandwidth, stability_bracket)
from offdiag.weights import WeightMatrix


def toeplitz(win, coeffs):
    return generate("toeplitz_from_coeffs", win, coeffs=coeffs)


def oracle_sigma(a, w, band):
    """Independent construction of the conjugated interior submatrix."""
    win = a.window
    sq = np.sqrt(w.values)
    conj = np.diag(sq) @ a.data @ np.diag(1.0 / sq)
    mask = np.abs(win.indices).max(axis=1) <= win.radius - band
    s = np.linalg.svd(conj[:, mask], compute_uv=False)
    return s[-1], s[0]


class TestBracket:
    def test_identity(self):
        win = Window(1, 16)
        rep = stability_bracket(generate("identity", win), 2.0, WeightSequence.trivial(win))
        assert rep.lower == rep.upper == 1.0
        assert rep.verdict == "stable"
        assert rep.method == "svd"

    def test_bounded_symbol_bracket(self):
        # symbol 2 + e^{-ix}: modulus range [1, 3]
        win = Window(1, 64)
        rep = stability_bracket(toeplitz(win, {0: 2.0, 1: 1.0}), 2.0,
                                WeightSequence.trivial(win))
        assert rep.lower >= 1.0 - 1e-9
        assert rep.upper <= 3.0 + 1e-9
        assert rep.verdict == "stable"

    def test_matches_svd_oracle(self):
        win = Window(1, 32)
        rng = np.random.default_rng(3)
        a = LocalizedMatrix(win, np.eye(win.size) + 0.3 * rng.standard_normal((win.size, win.size))
                            * (win.dist <= 2))
        w = WeightSequence.power(win, 0.5)
        rep = stability_bracket(a, 2.0, w, band=4)
        lo, hi = oracle_sigma(a, w, 4)
        assert rep.lower == pytest.approx(lo, abs=1e-8)
        assert rep.upper == pytest.approx(hi, abs=1e-8)

    def test_vanishing_symbol_degrades(self):
        sig = {}
        for r in (32, 256):
            win = Window(1, r)
            rep = stability_bracket(toeplitz(win, {0: 1.0, 1: -1.0}), 2.0,
                                    WeightSequence.trivial(win))
            sig[r] = rep.lower
            assert rep.verdict == "degrading"
        assert sig[256] < sig[32] / 4.0

    def test_sampled_path_for_other_q(self):
        win = Window(1, 24)
        a = toeplitz(win, {0: 2.0, 1: 1.0})
        rep = stability_bracket(a, 4.0, WeightSequence.trivial(win), trials=40, seed=1)
        assert rep.method == "sampled"
        assert rep.lower <= rep.upper
        assert rep.verdict == "stable"  # inherited from the q=2 certificate

    def test_empty_interior_rejected(self):
        win = Window(1, 8)
        a = generate("identity", win)
        with pytest.raises(ValueError):
            stability_bracket(a, 2.0, WeightSequence.trivial(win), band=8)

    def test_q_validation(self):
        win = Window(1, 8)
        a = generate("identity", win)
        with pytest.raises(ValueError):
            stability_bracket(a, 0.5, WeightSequence.trivial(win))
        with pytest.raises(ValueError):
            stability_bracket(a, math.inf, WeightSequence.trivial(win))

    def test_effective_bandwidth(self):
        win = Window(1, 8)
        assert effective_bandwidth(generate("identity", win)) == 0
        assert effective_bandwidth(toeplitz(win, {0: 1.0, 3: 0.5})) == 3
        assert effective_bandwidth(LocalizedMatrix(win, np.zeros((17, 17)))) == 0


class TestCrossVerdicts:
    PAIRS = [(1.0, WeightSequence.trivial), (2.0, WeightSequence.trivial),
             (2.0, lambda w: WeightSequence.power(w, 1.0)),
             (4.0, WeightSequence.trivial)]

    def test_bounded_family_all_stable(self):
        win = Window(1, 48)
        res = cross_stability_verdicts(toeplitz(win, {0: 2.0, 1: 1.0}), self.PAIRS,
                                       trials=30, seed=0)
        assert res.consistent
        assert {r.verdict for r in res.reports} == {"stable"}

    def test_vanishing_family_all_degrading(self):
        win = Window(1, 48)
        res = cross_stability_verdicts(toeplitz(win, {0: 1.0, 1: -1.0}), self.PAIRS,
                                       trials=30, seed=0)
        assert res.consistent
        assert {r.verdict for r in res.reports} == {"degrading"}

    def test_identity_all_stable_lower_one(self):
        win = Window(1, 32)
        res = cross_stability_verdicts(generate("identity", win), self.PAIRS,
                                       trials=30, seed=0)
        assert res.consistent
        for rep in res.reports:
            assert rep.verdict == "stable"
            if rep.method == "svd":
                assert rep.lower == pytest.approx(1.0, abs=1e-12)


class TestBoundedness:
    def test_identity_trivial(self):
        win = Window(1, 12)
        rep = boundedness_check(generate("identity", win), 2.0,
                                WeightSequence.trivial(win), 1.0,
                                WeightMatrix.trivial(1), trials=10, seed=0)
        assert rep.constant >= 1.0
        assert rep.worst_margin >= 0.0

    def test_shift_l2(self):
        # constant 2^2 3^{1/2} A_2^{1/2} C_1 ||S||_ring = 4 sqrt(3) * 3 vs lhs <= 1
        win = Window(1, 16)
        rep = boundedness_check(generate("shift", win), 2.0,
                                WeightSequence.trivial(win), 1.0,
                                WeightMatrix.trivial(1), trials=10, seed=1)
        assert rep.constant == pytest.approx(4.0 * math.sqrt(3.0) * 3.0, rel=1e-12)
        assert rep.worst_margin >= 0.0

    def test_zero_probe(self):
        win = Window(1, 8)
        a = LocalizedMatrix(win, np.zeros((win.size, win.size)))
        rep = boundedness_check(a, 1.0, WeightSequence.trivial(win), 1.0,
                                WeightMatrix.trivial(1), trials=3, seed=2)
        assert rep.worst_margin >= 0.0

    @pytest.mark.parametrize("q,alpha", [(1.0, -0.25), (2.0, 0.5), (4.0, 1.0)])
    def test_weighted_margins(self, q, alpha):
        win = Window(1, 12)
        a = generate("polynomial_decay_random", win, seed=5, alpha=2.5)
        rep = boundedness_check(a, q, WeightSequence.power(win, alpha), 2.0,
                                WeightMatrix.polynomial(2.0, 1), trials=20, seed=3)
        assert rep.worst_margin >= -1e-10


class TestPartitionOperator:
    def test_tent_values(self):
        win = Window(1, 64)
        psi = PartitionOperator(16, 0, win)
        vals = psi.values()
        ix = win.indices[:, 0]
        assert np.all(vals[np.abs(ix) <= 16] == 1.0)
        assert np.all(vals[np.abs(ix) >= 32] == 0.0)
        assert vals[win.flat(24)] == pytest.approx(0.5)
        assert np.all((0.0 <= vals) & (vals <= 1.0))

    def test_center_must_be_lattice_multiple(self):
        win = Window(1, 64)
        with pytest.raises(ValueError):
            PartitionOperator(16, 7, win)
        with pytest.raises(ValueError):
            PartitionOperator(16, 80, win)
        with pytest.raises(ValueError):
            PartitionOperator(64, 0, Window(1, 16))

    def test_alpha_trivial_weight(self):
        win = Window(1, 64)
        psi = PartitionOperator(8, 0, win)
        # sum of trivial weight over |i| < 16
        assert psi.alpha(WeightSequence.trivial(win)) == 31.0


class TestCommutator:
    def test_diagonal_matrix_commutes(self):
        win = Window(1, 64)
        rng = np.random.default_rng(0)
        c = LatticeSequence(win, rng.standard_normal(win.size) + 0j)
        rep = commutator_diagnostic(generate("identity", win), 8, 8, -8, 2.0,
                                    WeightSequence.trivial(win), c)
        assert rep.lhs == 0.0
        assert rep.margin >= 0.0

    def test_shift_probe_value(self):
        # tent slope 1/16 on the ramp; delta probe at the plateau edge
        win = Window(1, 128)
        c = LatticeSequence.delta(win, 16)
        rep = commutator_diagnostic(generate("shift", win), 16, 0, 0, 2.0,
                                    WeightSequence.trivial(win), c)
        assert rep.case == "near"
        assert rep.lhs == pytest.approx(1.0 / 16.0, abs=1e-15)
        assert rep.margin >= 0.0

    def test_far_case_support_separation(self):
        # bandwidth < sep/2 - 4N: the commutator annihilates the probe
        win = Window(1, 128)
        a = generate("banded_random", win, seed=2, bandwidth=2)
        rng = np.random.default_rng(1)
        c = LatticeSequence(win, rng.standard_normal(win.size) + 0j)
        rep = commutator_diagnostic(a, 8, -96, 32, 2.0, WeightSequence.trivial(win), c)
        assert rep.case == "far"
        assert rep.lhs == 0.0
        assert rep.margin >= 0.0

    @pytest.mark.parametrize("n_scale", [8, 16])
    @pytest.mark.parametrize("seed", range(4))
    def test_randomized_margins(self, n_scale, seed):
        win = Window(1, 128)
        rng = np.random.default_rng([seed, n_scale])
        a = generate("polynomial_decay_random", win, seed=seed, alpha=3.0)
        kmax = win.radius // n_scale
        n = n_scale * int(rng.integers(-kmax, kmax + 1))
        n_prime = n_scale * int(rng.integers(-kmax, kmax + 1))
        w = WeightSequence.trivial(win) if seed % 2 else WeightSequence.power(win, 0.5)
        c = LatticeSequence(win, rng.standard_normal(win.size)
                            + 1j * rng.standard_normal(win.size))
        rep = commutator_diagnostic(a, n_scale, n, n_prime, 2.0, w, c)
        assert rep.margin >= 0.0

    def test_probe_window_mismatch(self):
        win = Window(1, 32)
        c = LatticeSequence.delta(Window(1, 16))
        with pytest.raises(ValueError):
            commutator_diagnostic(generate("identity", win), 8, 0, 0, 2.0,
                                  WeightSequence.trivial(win), c)

    @pytest.mark.parametrize("centers", [((2, -2), (0, 2)), ((8, 8), (-8, -8))])
    def test_d2_margins(self, centers):
        win = Window(2, 8)
        a = generate("polynomial_decay_random", win, seed=4, alpha=3.0)
        rng = np.random.default_rng(0)
        c = LatticeSequence(win, rng.standard_normal(win.size) + 0j)
        n, n_prime = centers
        scale = 2 if n == (2, -2) else 1
        rep = commutator_diagnostic(a, scale, n, n_prime, 2.0,
                                    WeightSequence.trivial(win), c)
        assert rep.margin >= 0.0
