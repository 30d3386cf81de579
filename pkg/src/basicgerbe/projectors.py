"""Spectral-arc projectors and their derivatives.

An ordered pair of cut points (z1, z2) together with a unitary g defines
an arc of the circle and hence a sum of eigenspaces.  This module
classifies such pairs (positive/null/negative), builds the Riesz
projector onto the arc eigenspaces (closed form and contour quadrature),
extracts the canonically ordered eigenbasis that determinant-line fibers
use as a frame, and differentiates projectors in tangent directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .contour import (
    CUT_EXCLUSION,
    CutCirclePoint,
    arc_contour,
    circle_between,
    circle_gt,
    quad_integrate,
)
from .errors import (
    EmptySpaceError,
    GapError,
    IllConditionedCutError,
    StepTooLargeError,
)
from .linalg import (
    TWO_PI,
    SpectralDecomposition,
    TangentVector,
    UnitaryMatrix,
    spectral_decompose,
)

FD_STEP = 1e-5
MIN_SIMPLE_GAP = 1e-3


class Classification(enum.Enum):
    POSITIVE = "positive"
    NULL = "null"
    NEGATIVE = "negative"


@dataclass(frozen=True, eq=False)
class ArcContext:
    """A pair of cut points with the eigenvalues of g caught between them."""

    z1: CutCirclePoint
    z2: CutCirclePoint
    spec: SpectralDecomposition
    classification: Classification
    arc_indices: tuple

    @property
    def dim(self) -> int:
        return self.spec.dim

    def swapped(self) -> "ArcContext":
        cls = {
            Classification.POSITIVE: Classification.NEGATIVE,
            Classification.NEGATIVE: Classification.POSITIVE,
            Classification.NULL: Classification.NULL,
        }[self.classification]
        return ArcContext(self.z2, self.z1, self.spec, cls, self.arc_indices)


@dataclass(frozen=True, eq=False)
class ArcEigenspace:
    """Ordered orthonormal basis of the sum of arc eigenspaces."""

    context: ArcContext
    basis: np.ndarray  # n x dim, columns ordered from z1 toward z2
    eigenvalues: np.ndarray  # eigenvalue of each column

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _check_cuts(spec: SpectralDecomposition, *cuts: CutCirclePoint) -> None:
    for z in cuts:
        d = float(np.min(np.abs(spec.eigenvalues - z.value)))
        if d < CUT_EXCLUSION:
            raise IllConditionedCutError(
                f"cut within {d:.2e} of an eigenvalue (limit {CUT_EXCLUSION:.0e})"
            )


def classify(
    z1: CutCirclePoint, z2: CutCirclePoint, spec: SpectralDecomposition
) -> ArcContext:
    """Classify (z1, z2, g) and record which eigenvalues lie between the cuts."""
    _check_cuts(spec, z1, z2)
    arc = tuple(
        i
        for i, lam in enumerate(spec.eigenvalues)
        if circle_between(z1, z2, lam)
    )
    if not arc:
        cls = Classification.NULL
    elif circle_gt(z1, z2):
        cls = Classification.POSITIVE
    else:
        cls = Classification.NEGATIVE
    return ArcContext(z1, z2, spec, cls, arc)


def arc_projector(ctx: ArcContext, method: str = "residue") -> np.ndarray:
    """Projector onto the sum of eigenspaces between the cuts.

    Null contexts give the zero matrix.  Negative contexts are never
    computed directly; callers swap the cuts and dualize.
    """
    n = ctx.dim
    if ctx.classification is Classification.NULL:
        return np.zeros((n, n), dtype=complex)
    if ctx.classification is Classification.NEGATIVE:
        raise EmptySpaceError(
            "negative context: swap the cuts and work with the dual line"
        )
    if method == "residue":
        return ctx.spec.projectors[list(ctx.arc_indices)].sum(axis=0)
    if method == "quadrature":
        contour = arc_contour(ctx.z1, ctx.z2, ctx.spec)
        g = ctx.spec.matrix
        eye = np.eye(n)

        def resolvent(xs: np.ndarray) -> np.ndarray:
            return np.linalg.inv(xs[:, None, None] * eye - g)

        return quad_integrate(contour, resolvent, vectorized=True)
    raise ValueError(f"unknown method {method!r}")


def arc_basis(ctx: ArcContext) -> ArcEigenspace:
    """Canonically ordered orthonormal basis of the arc eigenspace.

    Columns are ordered by angular position descending from z1 toward z2;
    within a repeated eigenvalue the decomposition's order is kept.
    """
    if ctx.classification is not Classification.POSITIVE:
        raise EmptySpaceError("arc basis requires a positive context")
    a1 = ctx.z1.angle
    # angular distance of each arc eigenvalue below z1, increasing
    def key(i: int) -> float:
        return (a1 - float(np.angle(ctx.spec.eigenvalues[i]))) % TWO_PI

    order = sorted(ctx.arc_indices, key=key)
    cols = []
    lams = []
    for i in order:
        b = ctx.spec.bases[i]
        cols.append(b)
        lams.extend([ctx.spec.eigenvalues[i]] * b.shape[1])
    return ArcEigenspace(ctx, np.hstack(cols), np.array(lams))


def _fd_projector(ctx: ArcContext, x: TangentVector, h: float) -> np.ndarray:
    """Central finite difference of t -> arc projector at g exp(tA)."""
    import scipy.linalg

    vals = []
    for s in (h, -h):
        g2 = UnitaryMatrix(ctx.spec.matrix @ scipy.linalg.expm(s * x.direction))
        spec2 = spectral_decompose(g2)
        try:
            ctx2 = classify(ctx.z1, ctx.z2, spec2)
        except IllConditionedCutError as exc:
            raise StepTooLargeError(
                f"finite-difference step pushed an eigenvalue onto a cut: {exc}"
            ) from None
        if len(ctx2.arc_indices) != len(ctx.arc_indices):
            raise StepTooLargeError(
                "finite-difference step changed the arc eigenvalue count"
            )
        vals.append(arc_projector(ctx2))
    return (vals[0] - vals[1]) / (2 * h)


def projector_derivative(
    ctx: ArcContext, x: TangentVector, method: str = "residue", fd_step: float = FD_STEP
) -> np.ndarray:
    """Directional derivative of the arc projector along X = gA.

    Closed form: sum over i in the arc, j outside, of
    (lambda_i - lambda_j)^{-1} (P_i X P_j + P_j X P_i).
    """
    if ctx.classification is not Classification.POSITIVE:
        raise EmptySpaceError("projector derivative requires a positive context")
    if method == "fd":
        return _fd_projector(ctx, x, fd_step)
    if method != "residue":
        raise ValueError(f"unknown method {method!r}")
    lam = ctx.spec.eigenvalues
    proj = ctx.spec.projectors
    xm = x.ambient
    inside = set(ctx.arc_indices)
    out = np.zeros_like(xm)
    for i in inside:
        for j in range(ctx.spec.count):
            if j in inside:
                continue
            w = 1.0 / (lam[i] - lam[j])
            pi, pj = proj[i], proj[j]
            out += w * (pi @ xm @ pj + pj @ xm @ pi)
    return out


def single_projector_derivative(
    spec: SpectralDecomposition, k: int, x: TangentVector
) -> np.ndarray:
    """Derivative of the single-eigenvalue projector P_k along X = gA."""
    lam = spec.eigenvalues
    gaps = np.abs(lam - lam[k])
    gaps[k] = np.inf
    if float(gaps.min()) < MIN_SIMPLE_GAP:
        raise GapError(
            f"eigenvalue {k} is within {float(gaps.min()):.2e} of a neighbor"
        )
    xm = x.ambient
    out = np.zeros_like(xm)
    for j in range(spec.count):
        if j == k:
            continue
        w = 1.0 / (lam[k] - lam[j])
        out += w * (spec.projectors[k] @ xm @ spec.projectors[j]
                    + spec.projectors[j] @ xm @ spec.projectors[k])
    return out
