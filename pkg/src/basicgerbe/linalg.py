"""Dense complex linear algebra on unitary groups.

Unitary matrices, skew-Hermitian tangent vectors, Haar sampling, spectral
decomposition with eigenvalue clustering, and block embeddings
U(n) -> U(N), g |-> diag(g, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AmbiguousClusterError, DimensionError

UNITARITY_TOL = 1e-12
DEFAULT_CLUSTER_TOL = 1e-9

TWO_PI = 2.0 * np.pi


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def unitary_check(m: np.ndarray) -> tuple[bool, float]:
    """Return (is_unitary, defect) with defect = ||m m^H - I||_F."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    defect = float(np.linalg.norm(m @ m.conj().T - np.eye(n)))
    return defect <= UNITARITY_TOL * n, defect


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """An element g of U(n), stored as a dense complex matrix."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        ok, defect = unitary_check(mat)
        if not ok:
            raise DimensionError(
                f"matrix is not unitary: ||g g^H - I||_F = {defect:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def conjugate_by(self, k: "UnitaryMatrix") -> "UnitaryMatrix":
        """Return k g k^{-1}."""
        if k.dim != self.dim:
            raise DimensionError("conjugator dimension mismatch")
        return UnitaryMatrix(k.mat @ self.mat @ k.mat.conj().T)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector X = g A at g, with A skew-Hermitian."""

    base: UnitaryMatrix
    direction: np.ndarray  # the skew-Hermitian A

    def __post_init__(self):
        a = np.asarray(self.direction, dtype=complex)
        object.__setattr__(self, "direction", a)
        n = self.base.dim
        if a.shape != (n, n):
            raise DimensionError("tangent direction shape mismatch")
        if np.linalg.norm(a + a.conj().T) > UNITARITY_TOL * n * max(
            1.0, float(np.linalg.norm(a))
        ):
            raise DimensionError("tangent direction is not skew-Hermitian")

    @property
    def ambient(self) -> np.ndarray:
        """The ambient representative X = g A."""
        return self.base.mat @ self.direction


def random_unitary(n: int, rng) -> UnitaryMatrix:
    """Haar-distributed element of U(n), deterministic given the seed.

    QR of a complex Ginibre matrix with the R-diagonal phase fix.
    """
    if n < 1:
        raise DimensionError("dimension must be at least 1")
    gen = _as_generator(rng)
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return UnitaryMatrix(q)


def tangent_random(g: UnitaryMatrix, rng) -> TangentVector:
    """Random unit-Frobenius-norm skew-Hermitian direction at g."""
    gen = _as_generator(rng)
    n = g.dim
    b = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    a = (b - b.conj().T) / 2
    return TangentVector(g, a / np.linalg.norm(a))


def _pivot_phase(v: np.ndarray) -> np.ndarray:
    """Normalize the phase of v so its largest-magnitude entry is real positive."""
    p = int(np.argmax(np.abs(v)))
    phase = v[p] / abs(v[p])
    return v / phase


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """g = sum_i lambda_i P_i with distinct unit-circle eigenvalues.

    ``bases[i]`` is an orthonormal basis (n x k_i) of the lambda_i
    eigenspace; ``projectors[i] = bases[i] @ bases[i]^H``.  Eigenvalues are
    sorted by angle in [0, 2*pi).
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    projectors: np.ndarray
    multiplicities: np.ndarray
    bases: tuple

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.eigenvalues, self.projectors)

    def resolvent(self, xi: complex) -> np.ndarray:
        """(xi - g)^{-1} via the spectral resolution."""
        return np.einsum(
            "i,ijk->jk", 1.0 / (xi - self.eigenvalues), self.projectors
        )


def _cluster_circle(eigs: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group unit-circle values into clusters by chordal distance.

    Consecutive values (circularly, in angle order) closer than ``tol``
    are linked; a linked chain whose total diameter reaches ``tol`` is
    ambiguous and rejected.
    """
    m = len(eigs)
    order = np.argsort(np.angle(eigs) % TWO_PI)
    linked = np.zeros(m, dtype=bool)  # linked[j]: order[j] ~ order[j+1 mod m]
    for j in range(m):
        a = eigs[order[j]]
        b = eigs[order[(j + 1) % m]]
        linked[j] = abs(a - b) < tol
    if linked.all():
        # single chain around the whole circle
        if max(abs(eigs[i] - eigs[j]) for i in range(m) for j in range(m)) >= tol:
            raise AmbiguousClusterError(
                "eigenvalue chain spans more than the clustering tolerance"
            )
        return [order]
    # rotate so a cluster boundary sits at position 0
    start = int(np.argmin(linked)) + 1
    rot = np.roll(order, -start)
    linked = np.roll(linked, -start)
    clusters: list[list[int]] = [[rot[0]]]
    for j in range(m - 1):
        if linked[j]:
            clusters[-1].append(rot[j + 1])
        elif j + 1 < m:
            clusters.append([rot[j + 1]])
    for cl in clusters:
        diam = max(abs(eigs[i] - eigs[j]) for i in cl for j in cl)
        if diam >= tol:
            raise AmbiguousClusterError(
                f"cluster diameter {diam:.3e} >= tolerance {tol:.3e}"
            )
    return [np.array(cl) for cl in clusters]


def spectral_decompose(
    g: UnitaryMatrix, cluster_tol: float = DEFAULT_CLUSTER_TOL
) -> SpectralDecomposition:
    """Spectral resolution of a unitary matrix with eigenvalue clustering.

    Uses the complex Schur form (diagonal for normal matrices, with
    exactly orthonormal Schur vectors), clusters nearby eigenvalues, and
    re-orthonormalizes each cluster basis with modified Gram-Schmidt.
    """
    t, z = scipy.linalg.schur(g.mat, output="complex")
    raw = np.diagonal(t).copy()
    clusters = _cluster_circle(raw, cluster_tol)

    reps = []
    bases = []
    for cl in clusters:
        mean = raw[cl].mean()
        reps.append(mean / abs(mean))
        basis = z[:, np.sort(cl)].copy()
        # modified Gram-Schmidt; a near no-op since Schur vectors are orthonormal
        for j in range(basis.shape[1]):
            for i in range(j):
                basis[:, j] -= (basis[:, i].conj() @ basis[:, j]) * basis[:, i]
            basis[:, j] /= np.linalg.norm(basis[:, j])
            basis[:, j] = _pivot_phase(basis[:, j])
        bases.append(basis)

    reps_arr = np.array(reps)
    order = np.argsort(np.angle(reps_arr) % TWO_PI)
    reps_arr = reps_arr[order]
    bases = [bases[i] for i in order]
    projectors = np.stack([b @ b.conj().T for b in bases])
    mult = np.array([b.shape[1] for b in bases])
    return SpectralDecomposition(
        matrix=g.mat,
        eigenvalues=reps_arr,
        projectors=projectors,
        multiplicities=mult,
        bases=tuple(bases),
    )


def embed_block(g: UnitaryMatrix, big_dim: int) -> UnitaryMatrix:
    """Embed g in U(N) as diag(g, I_{N-n})."""
    n = g.dim
    if big_dim < n:
        raise DimensionError(f"cannot embed U({n}) into U({big_dim})")
    out = np.eye(big_dim, dtype=complex)
    out[:n, :n] = g.mat
    return UnitaryMatrix(out)


def embed_tangent(x: TangentVector, big_dim: int) -> TangentVector:
    """Embed a tangent vector alongside embed_block: A |-> diag(A, 0)."""
    n = x.base.dim
    if big_dim < n:
        raise DimensionError(f"cannot embed U({n}) into U({big_dim})")
    a = np.zeros((big_dim, big_dim), dtype=complex)
    a[:n, :n] = x.direction
    return TangentVector(embed_block(x.base, big_dim), a)


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize a complex matrix as {"dim", "re", "im"} (row-major)."""
    m = np.asarray(m, dtype=complex)
    return {
        "dim": m.shape[0],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj: dict, path: str = "$") -> np.ndarray:
    """Parse the {"dim", "re", "im"} matrix schema."""
    from .errors import SchemaError

    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    for key in ("dim", "re", "im"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing field")
    n = obj["dim"]
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, f"matrix entries are not numeric: {exc}") from None
    if re.shape != (n, n) or im.shape != (n, n):
        raise SchemaError(path, f"expected {n}x{n} 're' and 'im' blocks")
    return re + 1j * im
