import numpy as np
import pytest

from basicgerbe import (
    AmbiguousClusterError,
    DimensionError,
    SchemaError,
    TangentVector,
    UnitaryMatrix,
    embed_block,
    embed_tangent,
    matrix_from_json,
    matrix_to_json,
    random_unitary,
    spectral_decompose,
    tangent_random,
    unitary_check,
)


class TestUnitaryCheck:
    def test_identity(self):
        ok, defect = unitary_check(np.eye(3))
        assert ok and defect == 0.0

    def test_diagonal_unitary(self):
        ok, _ = unitary_check(np.diag([1j, -1j]))
        assert ok

    def test_non_unitary(self):
        ok, defect = unitary_check(np.diag([2.0, 1.0]))
        assert not ok and defect > 1.0

    def test_non_square(self):
        with pytest.raises(DimensionError):
            unitary_check(np.ones((2, 3)))


class TestRandomUnitary:
    def test_dim_one(self):
        g = random_unitary(1, 0)
        assert abs(abs(g.mat[0, 0]) - 1.0) < 1e-12

    def test_determinism(self):
        a = random_unitary(4, 7)
        b = random_unitary(4, 7)
        assert np.array_equal(a.mat, b.mat)

    def test_zero_dim_rejected(self):
        with pytest.raises(DimensionError):
            random_unitary(0, 1)

    def test_unitary_spectrum_sweep(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            g = random_unitary(4, rng)
            assert unitary_check(g.mat)[0]
            eigs = np.linalg.eigvals(g.mat)
            assert np.max(np.abs(np.abs(eigs) - 1.0)) < 1e-10


class TestSpectralDecompose:
    def test_identity(self):
        spec = spectral_decompose(UnitaryMatrix(np.eye(2)))
        assert spec.count == 1
        assert spec.multiplicities[0] == 2
        assert np.allclose(spec.projectors[0], np.eye(2))

    def test_diag_pair(self):
        spec = spectral_decompose(UnitaryMatrix(np.diag([1j, -1j])))
        assert spec.count == 2
        assert np.allclose(spec.eigenvalues, [1j, -1j])
        assert np.allclose(spec.projectors[0], np.diag([1.0, 0.0]))
        assert np.allclose(spec.projectors[1], np.diag([0.0, 1.0]))

    def test_reconstruction(self):
        g = random_unitary(5, 11)
        spec = spectral_decompose(g)
        assert np.linalg.norm(spec.reconstruct() - g.mat) < 1e-10

    def test_projector_algebra_sweep(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            spec = spectral_decompose(random_unitary(4, rng))
            total = spec.projectors.sum(axis=0)
            assert np.linalg.norm(total - np.eye(4)) < 1e-10
            for i in range(spec.count):
                p = spec.projectors[i]
                assert np.linalg.norm(p @ p - p) < 1e-10
                assert np.linalg.norm(p - p.conj().T) < 1e-10
                for j in range(i + 1, spec.count):
                    assert np.linalg.norm(p @ spec.projectors[j]) < 1e-10

    def test_cluster_merging(self):
        eps = 1e-12
        g = UnitaryMatrix(np.diag([1.0, np.exp(1j * eps), 1j]))
        spec = spectral_decompose(g)
        assert spec.count == 2
        assert spec.multiplicities[0] == 2

    def test_ambiguous_chain(self):
        # each neighbor within tol, total spread above it
        tol = 1e-9
        angles = np.arange(5) * 0.6 * tol
        g = UnitaryMatrix(np.diag(np.exp(1j * angles)))
        with pytest.raises(AmbiguousClusterError):
            spectral_decompose(g, cluster_tol=tol)

    def test_resolvent(self):
        g = random_unitary(3, 5)
        spec = spectral_decompose(g)
        xi = 2.0 + 0.5j
        direct = np.linalg.inv(xi * np.eye(3) - g.mat)
        assert np.linalg.norm(spec.resolvent(xi) - direct) < 1e-10


class TestTangentRandom:
    def test_skew_hermitian(self):
        g = random_unitary(3, 1)
        x = tangent_random(g, 2)
        assert np.linalg.norm(x.direction + x.direction.conj().T) < 1e-12

    def test_determinism(self):
        g = random_unitary(3, 1)
        assert np.array_equal(
            tangent_random(g, 9).direction, tangent_random(g, 9).direction
        )

    def test_entry_mean(self):
        g = random_unitary(3, 1)
        rng = np.random.default_rng(4)
        mean = np.mean(
            [tangent_random(g, rng).direction for _ in range(100)], axis=0
        )
        # entries are zero-mean with std ~ 1/(3 sqrt(100))
        assert np.max(np.abs(mean)) < 3 * 0.2

    def test_rejects_non_skew(self):
        g = random_unitary(2, 1)
        with pytest.raises(DimensionError):
            TangentVector(g, np.eye(2))


class TestEmbedding:
    def test_scalar_into_three(self):
        g = embed_block(UnitaryMatrix(np.diag([1j])), 3)
        assert np.allclose(g.mat, np.diag([1j, 1.0, 1.0]))

    def test_identity_embedding(self):
        g = random_unitary(3, 8)
        assert np.array_equal(embed_block(g, 3).mat, g.mat)

    def test_too_small(self):
        with pytest.raises(DimensionError):
            embed_block(random_unitary(3, 0), 2)

    def test_decomposition_commutes(self):
        g = random_unitary(3, 12)
        spec = spectral_decompose(g)
        bigspec = spectral_decompose(embed_block(g, 5))
        non_unit = [
            (v, p)
            for v, p in zip(bigspec.eigenvalues, bigspec.projectors)
            if abs(v - 1.0) > 1e-8
        ]
        small = {
            round(float(np.angle(v)), 6): p
            for v, p in zip(spec.eigenvalues, spec.projectors)
        }
        assert len(non_unit) == len(small)
        for v, p in non_unit:
            q = small[round(float(np.angle(v)), 6)]
            padded = np.zeros((5, 5), dtype=complex)
            padded[:3, :3] = q
            assert np.linalg.norm(p - padded) < 1e-9

    def test_tangent_embedding(self):
        g = random_unitary(2, 3)
        x = tangent_random(g, 4)
        xe = embed_tangent(x, 4)
        assert np.allclose(xe.direction[:2, :2], x.direction)
        assert np.linalg.norm(xe.direction[2:, :]) == 0.0


class TestMatrixJson:
    def test_round_trip(self):
        m = random_unitary(3, 6).mat
        assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)

    def test_missing_field(self):
        with pytest.raises(SchemaError) as err:
            matrix_from_json({"dim": 2, "re": [[1, 0], [0, 1]]})
        assert ".im" in str(err.value)

    def test_shape_mismatch(self):
        with pytest.raises(SchemaError):
            matrix_from_json({"dim": 2, "re": [[1.0]], "im": [[0.0]]})

    def test_non_numeric(self):
        with pytest.raises(SchemaError):
            matrix_from_json({"dim": 1, "re": [["x"]], "im": [[0.0]]})
