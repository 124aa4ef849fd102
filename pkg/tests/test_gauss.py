"""Stochastic-map semantics: composition, tensor, sampling, normal form."""

import numpy as np
import pytest

from gqa import diagram as dg
from gqa.diagram import parse_diagram
from gqa.gauss import (GaussMap, NotCausal, compose_gauss, gauss_map,
                       gauss_maps_equal, gauss_normal_form, gauss_state,
                       identity_gauss, interpret_causal, noise_factor, sample,
                       tensor_gauss)
from gqa.oracle import mc_moments
from helpers import random_causal_diagram, random_orthogonal


class TestComposition:
    def test_worked_scalar_example(self):
        # x -> 2x + noise(1,1) then y -> 3y + noise(0,4) is 6x + noise(3,13)
        f = gauss_map([[2.0]], [1.0], [[1.0]])
        g = gauss_map([[3.0]], [0.0], [[4.0]])
        h = compose_gauss(f, g)
        np.testing.assert_allclose(h.A, [[6.0]])
        np.testing.assert_allclose(h.b, [3.0])
        np.testing.assert_allclose(h.Sigma, [[13.0]])

    def test_identity_units(self):
        rng = np.random.default_rng(0)
        g = rng.standard_normal((3, 3))
        f = gauss_map(rng.standard_normal((3, 2)), rng.standard_normal(3), g @ g.T)
        assert gauss_maps_equal(compose_gauss(identity_gauss(2), f), f, 1e-12)
        assert gauss_maps_equal(compose_gauss(f, identity_gauss(3)), f, 1e-12)

    def test_monte_carlo_agreement(self):
        # composite moments against the empirical moments of chained draws
        rng = np.random.default_rng(42)
        g1 = rng.standard_normal((2, 2))
        g2 = rng.standard_normal((2, 2))
        f = gauss_map(rng.standard_normal((2, 2)), rng.standard_normal(2), g1 @ g1.T)
        g = gauss_map(rng.standard_normal((2, 2)), rng.standard_normal(2), g2 @ g2.T)
        h = compose_gauss(f, g)
        x = np.array([0.3, -1.2])
        n = 100_000
        mean, cov = mc_moments(h, x, n, seed=7)
        expected_mean = h.A @ x + h.b
        # five-sigma bands from the standard moment estimators
        mean_band = 5.0 * np.sqrt(np.diag(h.Sigma) / n)
        assert np.all(np.abs(mean - expected_mean) < mean_band + 1e-12)
        for i in range(2):
            for j in range(2):
                var_ij = h.Sigma[i, i] * h.Sigma[j, j] + h.Sigma[i, j] ** 2
                assert abs(cov[i, j] - h.Sigma[i, j]) < 5.0 * np.sqrt(var_ij / n)

    def test_psd_preserved_through_chains(self):
        rng = np.random.default_rng(3)
        f = identity_gauss(3)
        for _ in range(30):
            g = rng.standard_normal((3, 3))
            step = gauss_map(rng.standard_normal((3, 3)) * 0.7,
                             rng.standard_normal(3), g @ g.T)
            f = compose_gauss(f, step)
            assert np.min(np.linalg.eigvalsh(f.Sigma)) >= -1e-9


class TestTensor:
    def test_identity_blocks(self):
        assert gauss_maps_equal(tensor_gauss(identity_gauss(2), identity_gauss(1)),
                                identity_gauss(3), 1e-12)

    def test_unit_of_tensor(self):
        f = gauss_map([[1.0, 2.0]], [0.5], [[2.0]])
        assert gauss_maps_equal(tensor_gauss(f, identity_gauss(0)), f, 1e-12)
        assert gauss_maps_equal(tensor_gauss(identity_gauss(0), f), f, 1e-12)

    def test_blocks_entrywise(self):
        f = gauss_map([[2.0]], [1.0], [[1.0]])
        g = gauss_map([[3.0]], [-1.0], [[4.0]])
        h = tensor_gauss(f, g)
        np.testing.assert_allclose(h.A, [[2.0, 0.0], [0.0, 3.0]])
        np.testing.assert_allclose(h.b, [1.0, -1.0])
        np.testing.assert_allclose(h.Sigma, [[1.0, 0.0], [0.0, 4.0]])


class TestInterpretCausal:
    def test_sum_of_normals(self):
        f = interpret_causal(parse_diagram("(normal * normal) ; add"))
        assert f.A.shape == (1, 0)
        np.testing.assert_allclose(f.b, [0.0])
        np.testing.assert_allclose(f.Sigma, [[2.0]])

    def test_scale_then_discard(self):
        f = interpret_causal(parse_diagram("scalar(10) ; discard"))
        assert (f.dom, f.cod) == (1, 0)

    def test_prior_of_worked_program(self):
        # value = 50 + 10 * normal()
        d = parse_diagram("((one ; scalar(50)) * (normal ; scalar(10))) ; add")
        f = interpret_causal(d)
        np.testing.assert_allclose(f.b, [50.0])
        np.testing.assert_allclose(f.Sigma, [[100.0]])

    def test_rejects_mirrored_generators(self):
        with pytest.raises(NotCausal, match="coadd"):
            interpret_causal(parse_diagram("coadd ; add"))
        with pytest.raises(NotCausal, match="any"):
            interpret_causal(parse_diagram("any ; discard"))

    @pytest.mark.parametrize("seed", range(10))
    def test_functorial_on_seq(self, seed):
        from helpers import random_causal_layer
        rng = np.random.default_rng(seed)
        d = random_causal_diagram(rng, depth=3)
        e = dg.id_diagram(d.cod)
        for _ in range(3):
            e = dg.seq(e, random_causal_layer(rng, e.cod, 4))
        assert gauss_maps_equal(
            interpret_causal(dg.seq(d, e)),
            compose_gauss(interpret_causal(d), interpret_causal(e)), 1e-12)

    def test_orthogonal_invariance_of_normals(self):
        # a bus of unit normals pushed through any orthogonal map is unchanged
        rng = np.random.default_rng(9)
        for n in (2, 3):
            r = random_orthogonal(rng, n)
            bus = dg.par_all([dg.gen("normal")] * n)
            lhs = interpret_causal(dg.seq(bus, dg.matrix_diagram(r)))
            assert gauss_maps_equal(lhs, interpret_causal(bus), 1e-9)


class TestSampling:
    def test_deterministic_when_noiseless(self):
        f = gauss_map([[2.0], [0.0]], [1.0, -1.0], np.zeros((2, 2)))
        np.testing.assert_allclose(sample(f, [3.0], 5), [7.0, -1.0])

    def test_reproducible_for_fixed_seed(self):
        f = gauss_state([0.0], [[2.0]])
        a = sample(f, [], rng_seed=123)
        b = sample(f, [], rng_seed=123)
        c = sample(f, [], rng_seed=124)
        np.testing.assert_allclose(a, b)
        assert not np.allclose(a, c)

    def test_variance_band(self):
        # 1e5 draws of a variance-2 distribution: five-sigma chi-square band
        f = gauss_state([0.0], [[2.0]])
        _, cov = mc_moments(f, [], 100_000, seed=11)
        assert 1.94 <= cov[0, 0] <= 2.06


class TestNormalForm:
    def test_variance_two_state(self):
        f = gauss_state([0.0], [[2.0]])
        d = gauss_normal_form(f)
        counts = dg.generator_counts(d)
        assert counts.get("normal") == 1  # one noise wire, scaled by sqrt(2)
        assert gauss_maps_equal(interpret_causal(d), f, 1e-9)

    def test_identity_map(self):
        f = identity_gauss(2)
        d = gauss_normal_form(f)
        assert gauss_maps_equal(interpret_causal(d), f, 1e-9)

    def test_worked_joint_roundtrip(self):
        f = gauss_state([0.0, 0.0], [[100.0, 100.0], [100.0, 125.0]])
        assert gauss_maps_equal(interpret_causal(gauss_normal_form(f)), f, 1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_roundtrip_random(self, seed):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(0, 4)), int(rng.integers(0, 4))
        g = rng.standard_normal((n, max(0, n - 1)))
        f = GaussMap(rng.standard_normal((n, m)), rng.standard_normal(n), g @ g.T)
        assert gauss_maps_equal(interpret_causal(gauss_normal_form(f)), f, 1e-9)

    @pytest.mark.parametrize("seed", range(8))
    def test_encoding_uniqueness(self, seed):
        # noise factors L and L R (R orthogonal) build equal maps
        rng = np.random.default_rng(seed)
        n, k = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        low = rng.standard_normal((n, k))
        r = random_orthogonal(rng, k)
        bus = dg.par_all([dg.gen("normal")] * k)
        f1 = interpret_causal(dg.seq(bus, dg.matrix_diagram(low)))
        f2 = interpret_causal(dg.seq(bus, dg.matrix_diagram(low @ r)))
        assert gauss_maps_equal(f1, f2, 1e-9)

    def test_noise_factor_drops_zero_columns(self):
        f = gauss_state([0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]])
        assert noise_factor(f).shape == (2, 1)
