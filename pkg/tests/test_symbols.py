import math

import numpy as np
import pytest

from offdiag.lattice import Window, multiply, restrict
from offdiag.norms import beurling_norm
from offdiag.symbols import (SymbolCoeffs, VanishingSymbolError, astar_norm,
                             convolve, parse_coeffs, reciprocal_coeffs,
                             symbol_from_dict, symbol_min_modulus,
                             symbol_to_dict, toeplitz_matrix,
                             toeplitz_stability_criterion)


class TestAstarNorm:
    def test_delta(self):
        assert astar_norm(SymbolCoeffs(1, {0: 1.0})) == 1.0

    def test_geometric_tail(self):
        a = SymbolCoeffs(1, {n: 2.0 ** (-(n + 1)) for n in range(0, 40)})
        assert astar_norm(a) == pytest.approx(1.0, abs=1e-11)

    def test_two_coeffs(self):
        assert astar_norm(SymbolCoeffs(1, {0: 2.0, 1: 1.0})) == 3.0

    def test_empty(self):
        assert astar_norm(SymbolCoeffs(1, {})) == 0.0

    def test_sup_lower_bound(self):
        a = SymbolCoeffs(1, {-3: 0.5, 0: 2.0, 5: 1.5})
        assert astar_norm(a) >= max(abs(v) for v in a.coeffs.values())

    def test_d2_uses_ring_counts(self):
        # single coefficient at |n|_inf = 1 in d = 2: tail sups [3, 3],
        # ring counts [1, 8] -> 27 (the d = 1 one-sided tail sum would be 6)
        a = SymbolCoeffs(2, {(1, 0): 3.0})
        assert astar_norm(a) == 27.0
        assert astar_norm(SymbolCoeffs(1, {1: 3.0})) == 6.0

    @pytest.mark.parametrize("coeffs", [
        {0: 2.0, 1: 1.0},
        {-2: 0.3, 0: 1.0, 1: 0.7, 4: 0.1},
        {n: 2.0 ** (-abs(n)) for n in range(-8, 9)},
    ])
    def test_two_sided_vs_one_sided_ratio(self, coeffs):
        # ring norm counts k in Z, the tail norm counts k >= 0: the ratio is
        # observed in [1, 2), never asserted as a fixed constant
        a = SymbolCoeffs(1, coeffs)
        ring = beurling_norm(toeplitz_matrix(a, Window(1, 24)), 1.0)
        tail = astar_norm(a)
        assert 1.0 - 1e-12 <= ring / tail < 2.0

    def test_matches_toeplitz_ring_norm(self):
        # finiteness correspondence: the d=1 matrix ring norm equals the
        # two-sided tail sum, computable from the coefficients alone
        a = SymbolCoeffs(1, {-1: 0.25, 0: 2.0, 2: 0.5})
        win = Window(1, 16)
        mat_norm = beurling_norm(toeplitz_matrix(a, win), 1.0)
        per = np.zeros(3)
        for (n,), v in a.coeffs.items():
            per[abs(n)] = max(per[abs(n)], abs(v))
        tails = np.maximum.accumulate(per[::-1])[::-1]
        assert mat_norm == pytest.approx(tails[0] + 2 * tails[1] + 2 * tails[2], rel=1e-14)


class TestMinModulus:
    def test_shifted_constant(self):
        rep = symbol_min_modulus(SymbolCoeffs(1, {0: 2.0, 1: 1.0}))
        assert rep.min_modulus == pytest.approx(1.0, abs=1e-12)
        assert rep.argmin_xi[0] == pytest.approx(math.pi, abs=1e-12)
        assert rep.certified

    def test_vanishing(self):
        rep = symbol_min_modulus(SymbolCoeffs(1, {0: 1.0, 1: -1.0}))
        assert rep.min_modulus == pytest.approx(0.0, abs=1e-14)
        assert not rep.certified

    def test_constant_symbol(self):
        rep = symbol_min_modulus(SymbolCoeffs(1, {0: 3.5}))
        assert rep.min_modulus == 3.5
        assert rep.slack == 0.0
        assert rep.certified

    def test_grid_validation(self):
        a = SymbolCoeffs(1, {0: 1.0, 5: 0.5})
        with pytest.raises(ValueError):
            symbol_min_modulus(a, grid_size=16)

    def test_d2_symbol(self):
        a = SymbolCoeffs(2, {(0, 0): 3.0, (1, 0): 1.0, (0, 1): 1.0})
        coarse = symbol_min_modulus(a)  # minimal grid: slack 4pi/12 > min
        assert coarse.min_modulus == pytest.approx(1.0, abs=1e-12)
        assert not coarse.certified
        fine = symbol_min_modulus(a, grid_size=64)
        assert fine.min_modulus == pytest.approx(1.0, abs=1e-12)
        assert fine.certified

    def test_oracle_dense_evaluation(self):
        a = SymbolCoeffs(1, {-1: 0.3 + 0.1j, 0: 2.0, 2: -0.4})
        rep = symbol_min_modulus(a, grid_size=64)
        xi = 2 * np.pi * np.arange(64) / 64
        vals = sum(v * np.exp(-1j * n[0] * xi) for n, v in a.coeffs.items())
        assert rep.min_modulus == pytest.approx(np.abs(vals).min(), rel=1e-13)


class TestReciprocal:
    def test_geometric_expansion(self):
        b, rep = reciprocal_coeffs(SymbolCoeffs(1, {0: 2.0, 1: 1.0}), tol=1e-10)
        for n in range(0, 25):
            assert abs(b.value(n) - 0.5 * (-0.5) ** n) <= 1e-10
        for n in range(1, 25):
            assert abs(b.value(-n)) <= 1e-12
        assert rep.astar_norm == pytest.approx(1.0, abs=1e-10)

    def test_constant(self):
        b, _ = reciprocal_coeffs(SymbolCoeffs(1, {0: 4.0}), tol=1e-12)
        assert b.value(0) == pytest.approx(0.25, abs=1e-14)
        mass = sum(abs(v) for n, v in b.coeffs.items() if n != (0,))
        assert mass <= 1e-13

    def test_monomial(self):
        b, _ = reciprocal_coeffs(SymbolCoeffs(1, {1: 1.0}), tol=1e-12)
        assert b.value(-1) == pytest.approx(1.0, abs=1e-12)

    def test_convolution_residual(self):
        a = SymbolCoeffs(1, {-1: 0.5, 0: 3.0, 1: 0.5j})
        b, _ = reciprocal_coeffs(a, tol=1e-11)
        conv = convolve(a, b)
        resid = abs(conv.value(0) - 1.0) + sum(
            abs(v) for n, v in conv.coeffs.items() if n != (0,))
        assert resid <= 1e-10

    def test_vanishing_refused(self):
        with pytest.raises(VanishingSymbolError):
            reciprocal_coeffs(SymbolCoeffs(1, {0: 1.0, 1: -1.0}), tol=1e-8)

    def test_d2_rejected(self):
        with pytest.raises(ValueError):
            reciprocal_coeffs(SymbolCoeffs(2, {(0, 0): 2.0}), tol=1e-8)


class TestConvolutionConsistency:
    def test_toeplitz_product_interior(self):
        # Toeplitz(a) Toeplitz(b) agrees with Toeplitz(a*b) on the interior
        a = SymbolCoeffs(1, {0: 1.0, 1: 0.5})
        b = SymbolCoeffs(1, {-1: 0.25, 0: 2.0})
        win = Window(1, 16)
        prod = multiply(toeplitz_matrix(a, win), toeplitz_matrix(b, win))
        direct = toeplitz_matrix(convolve(a, b), win)
        inner = Window(1, 13)
        assert np.allclose(restrict(prod, inner).data, restrict(direct, inner).data,
                           rtol=0, atol=1e-14)


class TestStabilityCriterion:
    def test_bounded_symbol_stable(self):
        rep = toeplitz_stability_criterion(SymbolCoeffs(1, {0: 2.0, 1: 1.0}), 2.0,
                                           radii=(16, 32), trials=20, seed=0)
        assert rep.verdict == "stable"
        assert all(r.lower >= 0.9 for r in rep.brackets)

    def test_vanishing_symbol_degrading(self):
        rep = toeplitz_stability_criterion(SymbolCoeffs(1, {0: 1.0, 1: -1.0}), 2.0,
                                           radii=(16, 32), trials=20, seed=0)
        assert rep.verdict == "degrading"
        assert rep.brackets[-1].lower < rep.brackets[0].lower

    def test_constant_symbol(self):
        rep = toeplitz_stability_criterion(SymbolCoeffs(1, {0: 1.0}), 2.0,
                                           radii=(8,), trials=5, seed=0)
        assert rep.verdict == "stable"
        assert rep.brackets[0].lower == pytest.approx(1.0, abs=1e-12)
        assert rep.brackets[0].upper == pytest.approx(1.0, abs=1e-12)


class TestSerialization:
    def test_roundtrip(self):
        a = SymbolCoeffs(1, {-2: 1 + 2j, 0: 3.0, 5: -0.25})
        doc = symbol_to_dict(a)
        assert doc == {"d": 1, "coeffs": [[-2, 1.0, 2.0], [0, 3.0, 0.0], [5, -0.25, 0.0]]}
        back = symbol_from_dict(doc)
        assert back.coeffs == a.coeffs

    def test_d2_roundtrip(self):
        a = SymbolCoeffs(2, {(1, -1): 2j})
        back = symbol_from_dict(symbol_to_dict(a))
        assert back.value((1, -1)) == 2j

    def test_bad_row(self):
        with pytest.raises(ValueError):
            symbol_from_dict({"d": 2, "coeffs": [[1, 0.5, 0.0]]})


class TestParse:
    def test_simple(self):
        a = parse_coeffs("2@0,1@1")
        assert a.value(0) == 2.0 and a.value(1) == 1.0

    def test_complex_and_negative(self):
        a = parse_coeffs("1+2j@-1,-0.5@3")
        assert a.value(-1) == 1 + 2j
        assert a.value(3) == -0.5

    def test_d2(self):
        a = parse_coeffs("3@0,0;1@1,0", d=2)
        assert a.value((0, 0)) == 3.0
        assert a.value((1, 0)) == 1.0

    def test_malformed(self):
        with pytest.raises(ValueError):
            parse_coeffs("2")
