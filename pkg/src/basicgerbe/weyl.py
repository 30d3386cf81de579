"""The flag-torus parametrization (P, lambda) -> sum lambda_i P_i.

Points of (flag manifold) x (torus) are full rank-1 projector families
with distinct unit eigenvalues; the parametrization is an n!-sheeted
covering over regular unitaries.  Includes the Maurer-Cartan pullback,
tangent transport, and the closed forms for the pulled-back curving, its
exterior derivative, and the pulled-back three-curvature (raw and
simplified, kept separately as a regression pair).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .contour import CUT_EXCLUSION, CutCirclePoint, log_cut
from .errors import (
    DimensionError,
    IllConditionedCutError,
    RegularityError,
    SamplingError,
    SchemaError,
)
from .linalg import (
    TangentVector,
    UnitaryMatrix,
    _as_generator,
    matrix_from_json,
    matrix_to_json,
    random_unitary,
    spectral_decompose,
)

PROJECTOR_TOL = 1e-10
SAMPLING_GAP = 1e-3
REGULARITY_GAP = 1e-6
MAX_RESAMPLE = 1000


@dataclass(frozen=True, eq=False)
class FlagTorusPoint:
    """A full orthogonal projector family with distinct torus eigenvalues."""

    projections: np.ndarray  # (m, n, n)
    torus_values: np.ndarray  # (m,) unit modulus, distinct

    def __post_init__(self):
        p = np.asarray(self.projections, dtype=complex)
        lam = np.asarray(self.torus_values, dtype=complex)
        object.__setattr__(self, "projections", p)
        object.__setattr__(self, "torus_values", lam)
        m, n = p.shape[0], p.shape[1]
        if p.shape != (m, n, n) or lam.shape != (m,):
            raise DimensionError("projector family shape mismatch")
        if np.max(np.abs(np.abs(lam) - 1.0)) > PROJECTOR_TOL:
            raise DimensionError("torus values must have unit modulus")
        if np.linalg.norm(p.sum(axis=0) - np.eye(n)) > PROJECTOR_TOL * n:
            raise DimensionError("projector family is not complete")
        prod = np.einsum("aij,bjk->abik", p, p, optimize=True)
        want = np.zeros_like(prod)
        want[np.arange(m), np.arange(m)] = p
        if float(np.max(np.abs(prod - want))) > PROJECTOR_TOL:
            raise DimensionError("projector family is not orthogonal")

    @property
    def dim(self) -> int:
        return self.projections.shape[1]

    @property
    def count(self) -> int:
        return self.projections.shape[0]

    def is_regular(self, gap: float = REGULARITY_GAP) -> bool:
        if self.count != self.dim:
            return False
        lam = self.torus_values
        for i in range(self.count):
            for j in range(i + 1, self.count):
                if abs(lam[i] - lam[j]) < gap:
                    return False
        return True


def _require_regular(pt: FlagTorusPoint) -> None:
    if not pt.is_regular():
        raise RegularityError("point is not regular (repeated or close eigenvalues)")


@dataclass(frozen=True, eq=False)
class FlagTangent:
    """Tangent data (dlambda_i, dP_i) at a flag-torus point."""

    point: FlagTorusPoint
    dlam: np.ndarray  # (m,), each tangent to U(1) at lambda_i
    dP: np.ndarray  # (m, n, n)

    def __post_init__(self):
        dlam = np.asarray(self.dlam, dtype=complex)
        dp = np.asarray(self.dP, dtype=complex)
        object.__setattr__(self, "dlam", dlam)
        object.__setattr__(self, "dP", dp)
        pt = self.point
        m, n = pt.count, pt.dim
        if dlam.shape != (m,) or dp.shape != (m, n, n):
            raise DimensionError("tangent data shape mismatch")
        # dlambda_i must be tangent to the circle: dlam_i / (i lam_i) real
        radial = np.abs((dlam * np.conj(pt.torus_values)).real)
        if np.max(radial, initial=0.0) > PROJECTOR_TOL * max(
            1.0, float(np.max(np.abs(dlam), initial=0.0))
        ):
            raise DimensionError("dlambda is not tangent to the unit circle")
        if np.linalg.norm(dp.sum(axis=0)) > PROJECTOR_TOL * n:
            raise DimensionError("sum of dP_i must vanish")
        for i in range(m):
            p = pt.projections[i]
            if np.linalg.norm(p @ dp[i] + dp[i] @ p - dp[i]) > PROJECTOR_TOL * n:
                raise DimensionError("dP_i must be off-diagonal for P_i")


def weyl_apply(pt: FlagTorusPoint) -> UnitaryMatrix:
    """g = sum_i lambda_i P_i."""
    return UnitaryMatrix(np.einsum("i,ijk->jk", pt.torus_values, pt.projections))


def mc_pullback(tan: FlagTangent) -> np.ndarray:
    """Pullback of g^{-1} dg on the tangent:

    sum_i lam_i^{-1} dlam_i P_i + sum_{i,j} lam_i^{-1} lam_j P_i dP_j.
    """
    pt = tan.point
    lam = pt.torus_values
    torus = np.einsum("i,ijk->jk", tan.dlam / lam, pt.projections)
    d = np.einsum("j,jkl->kl", lam, tan.dP)
    ginv = np.einsum("i,ijk->jk", 1.0 / lam, pt.projections)
    return torus + ginv @ d


def weyl_tangent(tan: FlagTangent) -> TangentVector:
    """The image tangent vector X = g * (pullback of g^{-1} dg)."""
    g = weyl_apply(tan.point)
    return TangentVector(g, mc_pullback(tan))


def preimage_count(g: UnitaryMatrix) -> int:
    """Number of flag-torus points mapping to a regular g (equals n!)."""
    spec = spectral_decompose(g)
    if spec.count != g.dim:
        raise RegularityError("g has a repeated eigenvalue")
    lam = spec.eigenvalues
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            if abs(lam[i] - lam[j]) < REGULARITY_GAP:
                raise RegularityError("eigenvalue gap below regularity threshold")
    # the projector family is validated once; each sheet reorders it
    FlagTorusPoint(spec.projectors, lam)
    count = 0
    for perm in itertools.permutations(range(spec.count)):
        order = list(perm)
        image = np.einsum("i,ijk->jk", lam[order], spec.projectors[order])
        if np.linalg.norm(image - g.mat) <= 1e-10 * g.dim:
            count += 1
    return count


def sample_regular(n: int, rng, min_gap: float = SAMPLING_GAP) -> FlagTorusPoint:
    """Random regular point: Haar frame columns, well-separated eigenvalues."""
    gen = _as_generator(rng)
    q = random_unitary(n, gen).mat
    proj = np.stack([np.outer(q[:, i], q[:, i].conj()) for i in range(n)])
    for _ in range(MAX_RESAMPLE):
        lam = np.exp(1j * gen.uniform(0.0, 2 * math.pi, size=n))
        gaps = [abs(lam[i] - 1.0) for i in range(n)]
        gaps += [
            abs(lam[i] - lam[j]) for i in range(n) for j in range(i + 1, n)
        ]
        if min(gaps) >= min_gap:
            return FlagTorusPoint(proj, lam)
    raise SamplingError(f"no regular spectrum found in {MAX_RESAMPLE} draws")


def random_flag_tangent(pt: FlagTorusPoint, rng) -> FlagTangent:
    """Random tangent: dP_i = [A, P_i] for skew-Hermitian A, circular dlam."""
    gen = _as_generator(rng)
    n = pt.dim
    b = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    a = (b - b.conj().T) / 2
    a /= np.linalg.norm(a)
    dp = np.stack([a @ p - p @ a for p in pt.projections])
    dlam = 1j * pt.torus_values * gen.standard_normal(pt.count)
    return FlagTangent(pt, dlam, dp)


def torus_flag_tangent(pt: FlagTorusPoint, rates) -> FlagTangent:
    """Pure torus tangent dlam_i = i * rate_i * lam_i, dP = 0."""
    rates = np.asarray(rates, dtype=float)
    dlam = 1j * rates * pt.torus_values
    dp = np.zeros_like(pt.projections)
    return FlagTangent(pt, dlam, dp)


def _check_cut(pt: FlagTorusPoint, z: CutCirclePoint) -> None:
    d = float(np.min(np.abs(pt.torus_values - z.value)))
    if d < CUT_EXCLUSION:
        raise IllConditionedCutError(
            f"cut within {d:.2e} of a torus eigenvalue"
        )


def _antisym2(coeffs: np.ndarray, traces) -> complex:
    """Evaluate sum coeff_ik tr(P_i dP_k dP_k) on two antisymmetrized slots.

    ``traces(u, v)`` returns the (m, m) array tr(P_i dP_k[u] dP_k[v]).
    """
    t = traces(0, 1) - traces(1, 0)
    return complex(np.sum(coeffs * t))


def _pk_traces(pt: FlagTorusPoint, tans):
    """Closure over tr(P_i dP_k[u] dP_k[v]) for tangent slots u, v."""
    proj = pt.projections

    def traces(u: int, v: int) -> np.ndarray:
        m = pt.count
        out = np.empty((m, m), dtype=complex)
        for i in range(m):
            for k in range(m):
                out[i, k] = np.trace(proj[i] @ tans[u].dP[k] @ tans[v].dP[k])
        return out

    return traces


def pullback_curving_closed(
    pt: FlagTorusPoint, z: CutCirclePoint, tan1: FlagTangent, tan2: FlagTangent
) -> complex:
    """Closed form of the pulled-back curving at a regular point:

    (i / 4 pi) sum_{i != k}
        (log_z lam_i - log_z lam_k + (lam_k - lam_i) / lam_k)
        tr(P_i dP_k dP_k).
    """
    _require_regular(pt)
    _check_cut(pt, z)
    lam = pt.torus_values
    m = pt.count
    logs = np.array([log_cut(z, v) for v in lam])
    coeffs = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for k in range(m):
            if i != k:
                coeffs[i, k] = logs[i] - logs[k] + (lam[k] - lam[i]) / lam[k]
    val = _antisym2(coeffs, _pk_traces(pt, (tan1, tan2)))
    return complex(1j / (4 * math.pi) * val)


def _antisym3(fn, tans) -> complex:
    total = 0j
    for perm in itertools.permutations(range(3)):
        sign = 1
        p = list(perm)
        for i in range(3):
            for j in range(i + 1, 3):
                if p[i] > p[j]:
                    sign = -sign
        total += sign * fn(tans[perm[0]], tans[perm[1]], tans[perm[2]])
    return complex(total)


def pullback_df_closed(
    pt: FlagTorusPoint, tan1: FlagTangent, tan2: FlagTangent, tan3: FlagTangent
) -> complex:
    """Closed form of the exterior derivative of the pulled-back curving.

    (i / 4 pi) sum_{i != k}
        (dlam_i / lam_i - dlam_k / lam_k - dlam_i / lam_k
         + lam_i dlam_k / lam_k^2) tr(P_i dP_k dP_k)
    - (i / 4 pi) sum_{i != k} (lam_i / lam_k) tr(dP_i dP_k dP_k).

    Independent of the cut; also the simplified pulled-back 3-curvature.
    """
    _require_regular(pt)
    lam = pt.torus_values
    m = pt.count
    proj = pt.projections

    def term(u: FlagTangent, v: FlagTangent, w: FlagTangent) -> complex:
        total = 0j
        for i in range(m):
            for k in range(m):
                if i == k:
                    continue
                bracket = (
                    u.dlam[i] / lam[i]
                    - u.dlam[k] / lam[k]
                    - u.dlam[i] / lam[k]
                    + lam[i] * u.dlam[k] / lam[k] ** 2
                )
                total += bracket * np.trace(proj[i] @ v.dP[k] @ w.dP[k])
                total -= (lam[i] / lam[k]) * np.trace(
                    u.dP[i] @ v.dP[k] @ w.dP[k]
                )
        return complex(total)

    return complex(1j / (4 * math.pi) * _antisym3(term, (tan1, tan2, tan3)))


def pullback_nu_closed(
    pt: FlagTorusPoint, tan1: FlagTangent, tan2: FlagTangent, tan3: FlagTangent
) -> tuple[complex, complex]:
    """Pulled-back 3-curvature 2 pi i nu: (raw two-term sum, simplified form).

    raw: -(i / 4 pi) tr(Lam2 D g^{-1} D) - (i / 12 pi) tr((g^{-1} D)^3)
    with Lam2 = sum lam_i^{-2} dlam_i P_i and D = sum lam_j dP_j,
    antisymmetrized over the three slots.  simplified: pullback_df_closed.
    The pair doubles as a regression check on the wedge convention.
    """
    _require_regular(pt)
    lam = pt.torus_values
    proj = pt.projections
    ginv = np.einsum("i,ijk->jk", 1.0 / lam, proj)
    tans = (tan1, tan2, tan3)

    def lam2(t: FlagTangent) -> np.ndarray:
        return np.einsum("i,ijk->jk", t.dlam / lam**2, proj)

    def dmat(t: FlagTangent) -> np.ndarray:
        return np.einsum("j,jkl->kl", lam, t.dP)

    def term(u: FlagTangent, v: FlagTangent, w: FlagTangent) -> complex:
        t1 = np.trace(lam2(u) @ dmat(v) @ ginv @ dmat(w))
        t2 = np.trace(ginv @ dmat(u) @ ginv @ dmat(v) @ ginv @ dmat(w))
        return complex(-1j / (4 * math.pi) * t1 - 1j / (12 * math.pi) * t2)

    raw = _antisym3(term, tans)
    simplified = pullback_df_closed(pt, tan1, tan2, tan3)
    return raw, simplified


# ---------------------------------------------------------------------------
# JSON schema for flag-torus points


def _complex_from_json(obj, path: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) for v in obj)
    ):
        raise SchemaError(path, "expected [re, im]")
    return complex(obj[0], obj[1])


def flag_point_from_json(obj: dict, path: str = "$") -> tuple:
    """Parse {"lambda", "projections", "dlambda", "dP"} into (point, tangent).

    "dlambda"/"dP" are optional; the tangent is None when both are absent.
    """
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    for key in ("lambda", "projections"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing field")
    lam = np.array(
        [
            _complex_from_json(v, f"{path}.lambda[{i}]")
            for i, v in enumerate(obj["lambda"])
        ]
    )
    proj = np.stack(
        [
            matrix_from_json(p, f"{path}.projections[{i}]")
            for i, p in enumerate(obj["projections"])
        ]
    )
    try:
        pt = FlagTorusPoint(proj, lam)
    except DimensionError as exc:
        raise SchemaError(path, str(exc)) from None
    if ("dlambda" in obj) != ("dP" in obj):
        raise SchemaError(path, "dlambda and dP must be given together")
    if "dlambda" not in obj:
        return pt, None
    dlam = np.array(
        [
            _complex_from_json(v, f"{path}.dlambda[{i}]")
            for i, v in enumerate(obj["dlambda"])
        ]
    )
    dp = np.stack(
        [
            matrix_from_json(p, f"{path}.dP[{i}]")
            for i, p in enumerate(obj["dP"])
        ]
    )
    try:
        tan = FlagTangent(pt, dlam, dp)
    except DimensionError as exc:
        raise SchemaError(path, str(exc)) from None
    return pt, tan


def flag_point_to_json(pt: FlagTorusPoint, tan: FlagTangent | None = None) -> dict:
    out = {
        "lambda": [[v.real, v.imag] for v in pt.torus_values],
        "projections": [matrix_to_json(p) for p in pt.projections],
    }
    if tan is not None:
        out["dlambda"] = [[v.real, v.imag] for v in tan.dlam]
        out["dP"] = [matrix_to_json(p) for p in tan.dP]
    return out
