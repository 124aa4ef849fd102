"""Linear-algebra layer: decompositions, subspaces, projections."""

import numpy as np
import pytest

from gqa.linalg import (NotPSD, Subspace, full_space, givens_qr, image,
                        kernel, orth_complement, project, psd_factor,
                        pseudoinverse, subspace_image, subspaces_equal,
                        zero_space)


class TestGivensQR:
    def test_identity(self):
        q, r = givens_qr(np.eye(3))
        np.testing.assert_allclose(q, np.eye(3))
        np.testing.assert_allclose(r, np.eye(3))

    def test_single_rotation(self):
        # one Givens rotation is forced: the column (0,1) becomes (1,0)
        q, r = givens_qr(np.array([[0.0], [1.0]]))
        np.testing.assert_allclose(r, [[1.0], [0.0]], atol=1e-15)
        np.testing.assert_allclose(q @ q.T, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(q @ r, [[0.0], [1.0]], atol=1e-15)

    @pytest.mark.parametrize("shape", [(4, 3), (3, 4), (5, 5), (1, 3), (6, 2)])
    def test_reconstruction(self, shape):
        rng = np.random.default_rng(hash(shape) % 2**32)
        for _ in range(20):
            a = rng.standard_normal(shape)
            q, r = givens_qr(a)
            assert np.max(np.abs(q @ r - a)) < 1e-10
            assert np.max(np.abs(q.T @ q - np.eye(shape[0]))) < 1e-10
            assert np.max(np.abs(np.tril(r, -1))) == 0.0

    def test_empty_and_zero(self):
        q, r = givens_qr(np.zeros((3, 2)))
        np.testing.assert_allclose(q, np.eye(3))
        np.testing.assert_allclose(r, np.zeros((3, 2)))


class TestPseudoinverse:
    def test_two_ones_column(self):
        np.testing.assert_allclose(pseudoinverse([[1.0], [1.0]]), [[0.5, 0.5]])

    def test_zero_matrix(self):
        np.testing.assert_allclose(pseudoinverse(np.zeros((2, 3))), np.zeros((3, 2)))

    @pytest.mark.parametrize("seed", range(8))
    def test_penrose_identities_rank_deficient(self, seed):
        rng = np.random.default_rng(seed)
        u = rng.standard_normal((3, 2))
        v = rng.standard_normal((2, 3))
        a = u @ v  # rank <= 2
        g = pseudoinverse(a)
        assert np.max(np.abs(a @ g @ a - a)) < 1e-9
        assert np.max(np.abs(g @ a @ g - g)) < 1e-9
        assert np.max(np.abs((a @ g).T - a @ g)) < 1e-9
        assert np.max(np.abs((g @ a).T - g @ a)) < 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_penrose_identities_rectangular(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = rng.standard_normal((int(rng.integers(1, 6)), int(rng.integers(1, 6))))
        g = pseudoinverse(a)
        scale = max(1.0, np.max(np.abs(a)))
        assert np.max(np.abs(a @ g @ a - a)) < 1e-9 * scale


class TestSubspaces:
    def test_image_proportional_columns(self):
        s = image([[1.0, 2.0], [2.0, 4.0]])
        assert s.rank == 1
        expected = np.array([1.0, 2.0]) / np.sqrt(5.0)
        np.testing.assert_allclose(np.abs(s.basis[:, 0]), np.abs(expected), atol=1e-12)

    def test_project_onto_axis(self):
        s = image([[1.0], [0.0]])
        np.testing.assert_allclose(project(s, [5.0, 2.0]), [5.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_kernel_annihilates(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((2, 4))
        k = kernel(a)
        assert k.rank >= 2
        assert np.max(np.abs(a @ k.basis)) < 1e-10

    @pytest.mark.parametrize("seed", range(6))
    def test_complement_decomposition(self, seed):
        rng = np.random.default_rng(50 + seed)
        s = image(rng.standard_normal((5, int(rng.integers(0, 6)))))
        c = orth_complement(s)
        assert s.rank + c.rank == 5
        x = rng.standard_normal(5)
        np.testing.assert_allclose(project(s, x) + project(c, x), x, atol=1e-10)

    def test_equality_is_projector_equality(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((4, 2))
        mix = rng.standard_normal((2, 2)) + 3 * np.eye(2)  # invertible
        assert subspaces_equal(image(a), image(a @ mix))
        assert not subspaces_equal(image(a), full_space(4))
        # equivalence-relation sanity
        s, t = image(a), image(a @ mix)
        assert subspaces_equal(s, s) and subspaces_equal(t, s)

    def test_canonical_basis_is_generator_independent(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((5, 3))
        mix = rng.standard_normal((3, 3)) + 4 * np.eye(3)
        b1 = image(a).basis
        b2 = image(a @ mix).basis
        np.testing.assert_allclose(b1, b2, atol=1e-9)

    def test_subspace_image(self):
        rng = np.random.default_rng(13)
        t = rng.standard_normal((3, 4))
        s = image(rng.standard_normal((4, 2)))
        out = subspace_image(t, s)
        assert out.ambient_dim == 3
        assert subspaces_equal(out, image(t @ s.basis))
        assert subspace_image(t, zero_space(4)).rank == 0

    def test_trivial_spaces(self):
        assert zero_space(3).rank == 0
        assert full_space(3).rank == 3
        assert orth_complement(zero_space(2)) == full_space(2)


class TestPsdFactor:
    def test_scalar(self):
        np.testing.assert_allclose(psd_factor([[4.0]]), [[2.0]])

    def test_zero(self):
        np.testing.assert_allclose(psd_factor(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_worked_covariance(self):
        sigma = np.array([[100.0, 100.0], [100.0, 125.0]])
        low = psd_factor(sigma)
        assert np.max(np.abs(np.triu(low, 1))) == 0.0
        assert np.max(np.abs(low @ low.T - sigma)) < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_rank_deficient_psd(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((4, 2))
        sigma = g @ g.T
        low = psd_factor(sigma)
        assert np.max(np.abs(low @ low.T - sigma)) < 1e-9 * max(1.0, np.max(np.abs(sigma)))

    def test_rejects_negative_pivot(self):
        with pytest.raises(NotPSD):
            psd_factor([[-1.0]])

    def test_rejects_indefinite_with_zero_diagonal(self):
        with pytest.raises(NotPSD):
            psd_factor([[0.0, 1.0], [1.0, 0.0]])

    def test_rejects_asymmetric(self):
        with pytest.raises(NotPSD):
            psd_factor([[1.0, 0.5], [0.0, 1.0]])


def test_subspace_validates_orthonormality():
    with pytest.raises(ValueError):
        Subspace(2, np.array([[1.0], [1.0]]))
