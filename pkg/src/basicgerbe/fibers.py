"""Determinant-line fibers and the gerbe multiplication.

A positive pair of cuts carries the line det(E) spanned by the wedge of
an arc eigenbasis; a negative pair carries the dual line; a null pair
carries the scalars.  Elements are stored as an explicit orthonormal
frame plus a complex coefficient, so every identification reduces to an
O(k^3) change-of-basis determinant instead of exterior-algebra tensors.

Canonical frames (arc_basis order, shared eigenvector columns) are
chosen so that for a descending triple of cuts the frame of the outer
arc is literally the concatenation of the frames of the two inner arcs.
With that choice the triple section is the constant 1 in canonical
coordinates and all numeric content lives in frame determinants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import POINT_TOL, CutCirclePoint, circle_gt
from .errors import DimensionError, IncomparableError
from .linalg import (
    SpectralDecomposition,
    UnitaryMatrix,
    _as_generator,
    random_unitary,
    spectral_decompose,
)
from .projectors import ArcContext, Classification, arc_basis, classify

ELEMENT_TOL = 1e-9
FRAME_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DetLineElement:
    """coeff times the wedge of the frame columns (or its dual functional).

    kind "det": the element coeff * (f_1 ^ ... ^ f_k).
    kind "dualdet": the functional sending f_1 ^ ... ^ f_k to coeff;
    the frame is drawn from the swapped (positive) context.
    kind "scalar": the number coeff in the canonical trivialization.
    """

    ctx: ArcContext
    kind: str  # "det" | "dualdet" | "scalar"
    frame: np.ndarray  # n x k, orthonormal; shape (n, 0) for scalar
    coeff: complex

    def __post_init__(self):
        expected = {
            Classification.POSITIVE: "det",
            Classification.NEGATIVE: "dualdet",
            Classification.NULL: "scalar",
        }[self.ctx.classification]
        if self.kind != expected:
            raise IncomparableError(
                f"kind {self.kind!r} does not match a "
                f"{self.ctx.classification.value} context"
            )
        f = np.asarray(self.frame, dtype=complex)
        object.__setattr__(self, "frame", f)
        object.__setattr__(self, "coeff", complex(self.coeff))
        k = f.shape[1]
        if k and np.linalg.norm(f.conj().T @ f - np.eye(k)) > FRAME_TOL:
            raise DimensionError("frame is not orthonormal")

    @property
    def norm(self) -> float:
        return abs(self.coeff)


def _canonical_frame(ctx: ArcContext) -> np.ndarray:
    if ctx.classification is Classification.NULL:
        return np.zeros((ctx.dim, 0), dtype=complex)
    pos = ctx if ctx.classification is Classification.POSITIVE else ctx.swapped()
    return arc_basis(pos).basis


def fiber_element(ctx: ArcContext, coeff: complex) -> DetLineElement:
    """The element coeff times the canonical frame wedge (or its dual)."""
    kind = {
        Classification.POSITIVE: "det",
        Classification.NEGATIVE: "dualdet",
        Classification.NULL: "scalar",
    }[ctx.classification]
    return DetLineElement(ctx, kind, _canonical_frame(ctx), coeff)


def canonical_scalar(a: DetLineElement) -> complex:
    """Coefficient of ``a`` relative to the canonical frame of its context."""
    if a.kind == "scalar":
        return a.coeff
    q = _canonical_frame(a.ctx).conj().T @ a.frame
    det = np.linalg.det(q)
    if a.kind == "det":
        return a.coeff * det
    return a.coeff / det


def _same_ctx(a: ArcContext, b: ArcContext) -> bool:
    return (
        abs(a.z1.value - b.z1.value) <= POINT_TOL
        and abs(a.z2.value - b.z2.value) <= POINT_TOL
        and a.spec.dim == b.spec.dim
        and float(np.linalg.norm(a.spec.matrix - b.spec.matrix)) <= 1e-12 * a.spec.dim
    )


def same_element(a: DetLineElement, b: DetLineElement) -> tuple[bool, float]:
    """Whether a and b represent the same fiber vector, plus the discrepancy."""
    if not _same_ctx(a.ctx, b.ctx):
        raise IncomparableError("elements live over different points")
    ca, cb = canonical_scalar(a), canonical_scalar(b)
    disc = abs(ca - cb)
    return disc <= ELEMENT_TOL * max(1.0, abs(ca)), disc


def gerbe_product(a: DetLineElement, b: DetLineElement) -> DetLineElement:
    """Multiplication L_{(z1,z2)} x L_{(z2,z3)} -> L_{(z1,z3)}.

    In canonical coordinates the multiplication is scalar multiplication
    (the triple section is 1 there), so the product is the canonical
    element with coefficient canonical_scalar(a) * canonical_scalar(b).
    """
    if abs(a.ctx.z2.value - b.ctx.z1.value) > POINT_TOL:
        raise IncomparableError("middle cut points do not match")
    if float(np.linalg.norm(a.ctx.spec.matrix - b.ctx.spec.matrix)) > 1e-12 * a.ctx.dim:
        raise IncomparableError("group elements do not match")
    target = classify(a.ctx.z1, b.ctx.z2, a.ctx.spec)
    return fiber_element(target, canonical_scalar(a) * canonical_scalar(b))


def dual_pairing(dual: DetLineElement, elt: DetLineElement) -> complex:
    """Evaluate a dual-line element on a det-line element over the same arc."""
    if dual.kind != "dualdet" or elt.kind != "det":
        raise IncomparableError("pairing needs a dual element and a det element")
    if not _same_ctx(dual.ctx.swapped(), elt.ctx):
        raise IncomparableError("elements live over different arcs")
    return canonical_scalar(dual) * canonical_scalar(elt)


def swap_transport(a: DetLineElement) -> DetLineElement:
    """The element of the swapped-cut (dual) line pairing to 1 against a/|a|^2.

    For a unit element the transport inverts the canonical coefficient,
    so the dual pairing of the transport with the original is exactly 1.
    """
    if a.kind != "det":
        raise IncomparableError("swap transport is defined on det elements")
    return fiber_element(a.ctx.swapped(), 1.0 / canonical_scalar(a))


@dataclass(frozen=True, eq=False)
class TripleSectionValue:
    point: tuple  # (z1, z2, z3, spec)
    value: complex
    type_class: tuple  # (i, j) of the descending-sorted triple


def _sorted_desc(cuts):
    """Cuts in descending circular order plus the permutation sign."""
    idx = sorted(range(len(cuts)), key=lambda i: -cuts[i].angle)
    sign = 1
    perm = list(idx)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return [cuts[i] for i in idx], sign


def section_value(
    z1: CutCirclePoint,
    z2: CutCirclePoint,
    z3: CutCirclePoint,
    spec: SpectralDecomposition,
) -> TripleSectionValue:
    """Scalar of the multiplication section in canonical frames.

    For a descending triple it is the determinant comparing the outer
    canonical frame with the concatenation of the two inner ones (which
    the frame convention makes exactly 1); other orderings extend by
    antisymmetry, raising the sorted value to the permutation sign.
    """
    (w1, w2, w3), sign = _sorted_desc([z1, z2, z3])
    c12 = classify(w1, w2, spec)
    c23 = classify(w2, w3, spec)
    c13 = classify(w1, w3, spec)
    t = (
        int(c12.classification is Classification.POSITIVE),
        int(c23.classification is Classification.POSITIVE),
    )
    if t == (1, 1):
        concat = np.hstack([_canonical_frame(c12), _canonical_frame(c23)])
        val = complex(np.linalg.det(_canonical_frame(c13).conj().T @ concat))
    elif t == (1, 0):
        val = complex(np.linalg.det(_canonical_frame(c13).conj().T @ _canonical_frame(c12)))
    elif t == (0, 1):
        val = complex(np.linalg.det(_canonical_frame(c13).conj().T @ _canonical_frame(c23)))
    else:
        val = 1.0 + 0j
    if sign < 0:
        val = 1.0 / val
    return TripleSectionValue((z1, z2, z3, spec), val, t)


def random_element(ctx: ArcContext, rng) -> DetLineElement:
    """Unit-norm element in a randomly rotated frame (canonical for scalars)."""
    gen = _as_generator(rng)
    coeff = complex(np.exp(1j * gen.uniform(0.0, 2 * math.pi)))
    frame = _canonical_frame(ctx)
    k = frame.shape[1]
    if k:
        frame = frame @ random_unitary(k, gen).mat
    kind = {
        Classification.POSITIVE: "det",
        Classification.NEGATIVE: "dualdet",
        Classification.NULL: "scalar",
    }[ctx.classification]
    return DetLineElement(ctx, kind, frame, coeff)


def associativity_check(
    z1: CutCirclePoint,
    z2: CutCirclePoint,
    z3: CutCirclePoint,
    z4: CutCirclePoint,
    spec: SpectralDecomposition,
    rng,
) -> float:
    """Max defect of ((a*b)*c) vs (a*(b*c)) over random unit elements."""
    gen = _as_generator(rng)
    defect = 0.0
    for _ in range(4):
        a = random_element(classify(z1, z2, spec), gen)
        b = random_element(classify(z2, z3, spec), gen)
        c = random_element(classify(z3, z4, spec), gen)
        left = gerbe_product(gerbe_product(a, b), c)
        right = gerbe_product(a, gerbe_product(b, c))
        _, d = same_element(left, right)
        defect = max(defect, d)
    return defect


def conjugate_fiber(k: UnitaryMatrix, a: DetLineElement) -> DetLineElement:
    """Push a fiber element along g -> k g k^{-1}, frame vectors by v -> k v."""
    ctx = a.ctx
    if k.dim != ctx.dim:
        raise DimensionError("conjugator dimension mismatch")
    g2 = UnitaryMatrix(ctx.spec.matrix).conjugate_by(k)
    ctx2 = classify(ctx.z1, ctx.z2, spectral_decompose(g2))
    return DetLineElement(ctx2, a.kind, k.mat @ a.frame, a.coeff)


def weyl_line_map(g: UnitaryMatrix, a: DetLineElement) -> DetLineElement:
    """Fiber map over the conjugation t -> g t g^{-1} of a torus element."""
    t = a.ctx.spec.matrix
    if float(np.linalg.norm(t - np.diag(np.diagonal(t)))) > 1e-12 * a.ctx.dim:
        raise DimensionError("base element is not a torus (diagonal) matrix")
    return conjugate_fiber(g, a)
