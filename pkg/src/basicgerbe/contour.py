"""Geometry of the cut unit circle and contour integration.

The circle U(1) with the identity removed carries the partial order
"z1 > z2 iff z2 rotates counter-clockwise into z1 without passing 1".
This module implements that order, the betweenness predicate, the family
of branch logarithms log_z with cut along the ray through z and
log_z(1) = 0, annular-sector contours around spectral arcs, adaptive
Gauss-Legendre contour quadrature, and a small residue engine for pole
orders up to 3 (optionally with a log_z factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BoundaryError,
    BranchCutError,
    EmptySpaceError,
    EvaluationError,
    IllConditionedCutError,
    IncomparableError,
    UnsupportedOrderError,
)
from .linalg import TWO_PI, SpectralDecomposition

POINT_TOL = 1e-12
CUT_EXCLUSION = 1e-6  # minimal chordal distance between a cut and an eigenvalue
DEFAULT_RADIAL_HALF_WIDTH = 0.5
DEFAULT_NODES = 64
MAX_NODES = 1024
QUAD_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CutCirclePoint:
    """A point of U(1) \\ {1}."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if abs(abs(v) - 1.0) > POINT_TOL:
            raise BoundaryError(f"|z| = {abs(v)!r} is not on the unit circle")
        if abs(v - 1.0) <= POINT_TOL:
            raise BoundaryError("the identity 1 is not a cut point")

    @property
    def angle(self) -> float:
        """Argument in (0, 2*pi)."""
        return math.atan2(self.value.imag, self.value.real) % TWO_PI


def cut_point(angle: float) -> CutCirclePoint:
    """Cut point at the given angle (radians)."""
    return CutCirclePoint(complex(np.exp(1j * angle)))


def circle_gt(z1: CutCirclePoint, z2: CutCirclePoint) -> bool:
    """True iff z2 rotates counter-clockwise into z1 without passing 1."""
    if abs(z1.value - z2.value) <= POINT_TOL:
        raise IncomparableError("equal cut points are incomparable")
    return z1.angle > z2.angle


def circle_between(z1: CutCirclePoint, z2: CutCirclePoint, lam: complex) -> bool:
    """True iff lam lies in the component of U(1) - {z1, z2} not containing 1.

    Symmetric in (z1, z2).
    """
    if abs(z1.value - z2.value) <= POINT_TOL:
        raise IncomparableError("cut points coincide")
    lam = complex(lam)
    if min(abs(lam - z1.value), abs(lam - z2.value)) <= POINT_TOL:
        raise BoundaryError("point coincides with an arc endpoint")
    lo, hi = sorted((z1.angle, z2.angle))
    a = math.atan2(lam.imag, lam.real) % TWO_PI
    return lo < a < hi


def _ray_distance(z: CutCirclePoint, xi: complex) -> float:
    """Distance from xi to the closed ray from the origin through z."""
    # project onto the unit direction of the ray
    d = z.value
    t = (xi * d.conjugate()).real
    if t <= 0.0:
        return abs(xi)
    return abs(xi - t * d)


def log_cut(z: CutCirclePoint, xi: complex) -> complex:
    """Branch of log cut along the ray R_z, normalized by log_z(1) = 0.

    The imaginary part lies in (arg z - 2*pi, arg z) for arg z in (0, 2*pi).
    """
    xi = complex(xi)
    if _ray_distance(z, xi) < POINT_TOL:
        raise BranchCutError("argument lies on the branch cut")
    a = z.angle
    phi = math.atan2(xi.imag, xi.real)
    while phi >= a:
        phi -= TWO_PI
    while phi < a - TWO_PI:
        phi += TWO_PI
    return complex(math.log(abs(xi)), phi)


def log_cut_array(z: CutCirclePoint, xs: np.ndarray) -> np.ndarray:
    """Vectorized log_cut for points known to avoid the cut ray."""
    xs = np.asarray(xs, dtype=complex)
    a = z.angle
    phi = np.angle(xs)
    phi -= TWO_PI * np.floor((phi - (a - TWO_PI)) / TWO_PI)
    return np.log(np.abs(xs)) + 1j * phi


# ---------------------------------------------------------------------------
# contours


@dataclass(frozen=True, eq=False)
class Segment:
    """One smooth piece of a contour: a circular arc about 0 or a line."""

    kind: str  # "arc" | "line"
    # arc: radius, theta0 -> theta1 (oriented); line: start -> end
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0
    start: complex = 0j
    end: complex = 0j

    def point(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "arc":
            theta = self.theta0 + (self.theta1 - self.theta0) * t
            return self.radius * np.exp(1j * theta)
        return self.start + (self.end - self.start) * t

    def derivative(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "arc":
            theta = self.theta0 + (self.theta1 - self.theta0) * t
            return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * theta)
        return np.full_like(np.asarray(t, dtype=float), self.end - self.start,
                            dtype=complex)

    @property
    def endpoints(self) -> tuple[complex, complex]:
        t = np.array([0.0, 1.0])
        p = self.point(t)
        return complex(p[0]), complex(p[1])

    def to_json(self) -> dict:
        if self.kind == "arc":
            return {
                "kind": "arc",
                "radius": self.radius,
                "theta0": self.theta0,
                "theta1": self.theta1,
            }
        return {
            "kind": "line",
            "start": [self.start.real, self.start.imag],
            "end": [self.end.real, self.end.imag],
        }


@dataclass(frozen=True, eq=False)
class Contour:
    """A closed, counter-clockwise oriented chain of segments."""

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:] + segs[:1]):
            if abs(a.endpoints[1] - b.endpoints[0]) > 1e-9:
                raise EvaluationError("contour is not closed")

    def to_json(self) -> dict:
        return {"segments": [s.to_json() for s in self.segments]}


def annular_sector(
    theta_lo: float, theta_hi: float, rho: float = DEFAULT_RADIAL_HALF_WIDTH
) -> Contour:
    """CCW boundary of {1-rho <= |xi| <= 1+rho, theta_lo <= arg xi <= theta_hi}."""
    r_in, r_out = 1.0 - rho, 1.0 + rho
    segs = (
        Segment("arc", radius=r_out, theta0=theta_lo, theta1=theta_hi),
        Segment(
            "line",
            start=r_out * np.exp(1j * theta_hi),
            end=r_in * np.exp(1j * theta_hi),
        ),
        Segment("arc", radius=r_in, theta0=theta_hi, theta1=theta_lo),
        Segment(
            "line",
            start=r_in * np.exp(1j * theta_lo),
            end=r_out * np.exp(1j * theta_lo),
        ),
    )
    return Contour(segs)


def _check_cut_distance(z: CutCirclePoint, spec: SpectralDecomposition) -> None:
    d = np.min(np.abs(spec.eigenvalues - z.value))
    if d < CUT_EXCLUSION:
        raise IllConditionedCutError(
            f"cut point within {d:.2e} of an eigenvalue (limit {CUT_EXCLUSION:.0e})"
        )


def arc_contour(
    z1: CutCirclePoint,
    z2: CutCirclePoint,
    spec: SpectralDecomposition,
    rho: float = DEFAULT_RADIAL_HALF_WIDTH,
) -> Contour:
    """Annular-sector contour enclosing exactly the eigenvalues between z1, z2.

    The radial cuts sit halfway between each cut point and the nearest
    excluded eigenvalue (or the identity), so the contour stays well away
    from every pole of the resolvent.
    """
    _check_cut_distance(z1, spec)
    _check_cut_distance(z2, spec)
    a_lo, a_hi = sorted((z1.angle, z2.angle))
    angles = np.angle(spec.eigenvalues) % TWO_PI
    inside = (angles > a_lo) & (angles < a_hi)
    if not inside.any():
        raise EmptySpaceError("no eigenvalues between the cut points")
    below = angles[(~inside) & (angles < a_lo)]
    gap_lo = a_lo - (below.max() if below.size else 0.0)
    above = angles[(~inside) & (angles > a_hi)]
    gap_hi = (above.min() if above.size else TWO_PI) - a_hi
    return annular_sector(a_lo - gap_lo / 2, a_hi + gap_hi / 2, rho)


def spectrum_contour(
    z: CutCirclePoint,
    spec: SpectralDecomposition,
    rho: float = DEFAULT_RADIAL_HALF_WIDTH,
) -> Contour:
    """Annular-sector contour around all of spec(g), avoiding the ray R_z."""
    _check_cut_distance(z, spec)
    a = z.angle
    shifted = (np.angle(spec.eigenvalues) - a) % TWO_PI
    gap_lo = shifted.min()
    gap_hi = TWO_PI - shifted.max()
    return annular_sector(a + gap_lo / 2, a + TWO_PI - gap_hi / 2, rho)


@lru_cache(maxsize=32)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    # map to [0, 1]
    return (x + 1.0) / 2.0, w / 2.0


def _quad_once(contour: Contour, integrand, nodes: int, vectorized: bool):
    t, w = _leggauss(nodes)
    total = None
    for seg in contour.segments:
        xs = seg.point(t)
        ds = seg.derivative(t)
        if vectorized:
            vals = np.asarray(integrand(xs), dtype=complex)
        else:
            vals = np.asarray([integrand(complex(x)) for x in xs], dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("integrand is not finite on the contour")
        term = np.tensordot(w * ds, vals, axes=(0, 0))
        total = term if total is None else total + term
    return np.asarray(total) / (2j * np.pi)


def quad_integrate(
    contour: Contour,
    integrand,
    rtol: float = QUAD_RTOL,
    start_nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
    vectorized: bool = False,
):
    """(1/2*pi*i) times the contour integral of ``integrand``.

    Composite Gauss-Legendre per segment; the node count doubles until two
    successive estimates agree to ``rtol`` (relative to max(1, |value|)).
    The integrand may return a scalar or an ndarray; with ``vectorized``
    it receives the whole node array at once (leading axis = nodes).
    """
    nodes = start_nodes
    prev = _quad_once(contour, integrand, nodes, vectorized)
    while nodes < max_nodes:
        nodes *= 2
        cur = _quad_once(contour, integrand, nodes, vectorized)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if float(np.max(np.abs(cur - prev))) <= rtol * scale:
            return cur if cur.shape else complex(cur)
        prev = cur
    return prev if prev.shape else complex(prev)


def residue_eval(
    poles,
    coeff=None,
    with_log: CutCirclePoint | None = None,
) -> complex:
    """Sum of residues of coeff(xi) * [log_z(xi)] * prod (xi - lam_k)^{-m_k}.

    ``poles`` is a sequence of (lam, order) with order <= 3.  ``coeff`` is
    an optional sequence of callables (f, f', f'') giving the analytic
    factor and as many derivatives as the highest pole order requires;
    omitted entries default to the constant 1 and zero derivatives.
    """
    poles = [(complex(lam), int(m)) for lam, m in poles]
    for lam, m in poles:
        if m > 3 or m < 1:
            raise UnsupportedOrderError(f"pole order {m} is not supported")
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i][0] - poles[j][0]) <= POINT_TOL:
                raise IncomparableError("poles are not distinct")

    def c_derivs(x: complex) -> tuple[complex, complex, complex]:
        if coeff is None:
            return 1.0, 0.0, 0.0
        fs = list(coeff) + [None, None, None]
        return (
            fs[0](x) if fs[0] is not None else 1.0,
            fs[1](x) if fs[1] is not None else 0.0,
            fs[2](x) if fs[2] is not None else 0.0,
        )

    total = 0j
    for k, (lam, m) in enumerate(poles):
        others = [(mu, mm) for i, (mu, mm) in enumerate(poles) if i != k]
        r0 = np.prod([(lam - mu) ** (-mm) for mu, mm in others]) if others else 1.0
        s1 = sum(-mm / (lam - mu) for mu, mm in others)
        s2 = sum(mm / (lam - mu) ** 2 for mu, mm in others)
        r1 = r0 * s1
        r2 = r0 * (s1 * s1 + s2)
        if with_log is not None:
            l0 = log_cut(with_log, lam)
            l1 = 1.0 / lam
            l2 = -1.0 / lam**2
        else:
            l0, l1, l2 = 1.0, 0.0, 0.0
        c0, c1, c2 = c_derivs(lam)
        if m == 1:
            total += c0 * l0 * r0
        elif m == 2:
            total += c1 * l0 * r0 + c0 * l1 * r0 + c0 * l0 * r1
        else:
            f2 = (
                c2 * l0 * r0
                + 2 * c1 * l1 * r0
                + 2 * c1 * l0 * r1
                + c0 * l2 * r0
                + 2 * c0 * l1 * r1
                + c0 * l0 * r2
            )
            total += f2 / 2
    return complex(total)
