"""Random instances for property sweeps: well-separated spectra and cuts.

Cuts are drawn from the middle half of angular gaps so that contours stay
uniformly away from resolvent poles and quadrature converges within the
node budget.  Group elements are resampled until the spectrum (including
the distance to the identity) clears a minimum gap.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .contour import CutCirclePoint, cut_point
from .errors import SamplingError
from .linalg import (
    TWO_PI,
    SpectralDecomposition,
    UnitaryMatrix,
    _as_generator,
    random_unitary,
    spectral_decompose,
)
from .projectors import ArcContext, Classification, classify

MIN_SPECTRAL_GAP = 0.2
MAX_TRIES = 200


def sample_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    """Deterministic per-sample generator, independent of execution order."""
    digest = hashlib.sha256(f"{seed}:{suite}:{index}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def well_separated_unitary(
    n: int, rng, min_gap: float = MIN_SPECTRAL_GAP
) -> tuple[UnitaryMatrix, SpectralDecomposition]:
    """Haar sample resampled until all angular gaps (and the gap to the
    identity) are at least min_gap."""
    gen = _as_generator(rng)
    for _ in range(MAX_TRIES):
        g = random_unitary(n, gen)
        spec = spectral_decompose(g)
        marks = np.sort(
            np.concatenate([np.angle(spec.eigenvalues) % TWO_PI, [0.0]])
        )
        gaps = np.diff(np.concatenate([marks, [marks[0] + TWO_PI]]))
        if float(gaps.min()) >= min_gap:
            return g, spec
    raise SamplingError(f"no well-separated spectrum in {MAX_TRIES} draws")


def _gap_list(spec: SpectralDecomposition) -> list[tuple[float, float]]:
    """Angular gaps between consecutive marks (eigenvalues and the identity)."""
    marks = np.sort(np.concatenate([np.angle(spec.eigenvalues) % TWO_PI, [0.0]]))
    out = []
    for a, b in zip(marks, np.concatenate([marks[1:], [marks[0] + TWO_PI]])):
        if b > a:
            out.append((float(a), float(b)))
    return out


def random_cut_in_gap(gap: tuple[float, float], rng) -> CutCirclePoint:
    """A cut uniform over the middle half of the gap."""
    lo, hi = gap
    width = hi - lo
    gen = _as_generator(rng)
    return cut_point((lo + width * gen.uniform(0.25, 0.75)) % TWO_PI)


def random_cuts(spec: SpectralDecomposition, rng, count: int) -> list[CutCirclePoint]:
    """``count`` cuts in distinct angular gaps (needs count <= gap count)."""
    gaps = _gap_list(spec)
    if count > len(gaps):
        raise SamplingError("not enough angular gaps for the requested cuts")
    gen = _as_generator(rng)
    picks = gen.choice(len(gaps), size=count, replace=False)
    return [random_cut_in_gap(gaps[i], gen) for i in picks]


def random_positive_context(spec: SpectralDecomposition, rng) -> ArcContext:
    """A positive-stratum context with at least one enclosed eigenvalue."""
    gen = _as_generator(rng)
    for _ in range(MAX_TRIES):
        z1, z2 = random_cuts(spec, gen, 2)
        ctx = classify(z1, z2, spec)
        if ctx.classification is Classification.POSITIVE:
            return ctx
        if ctx.classification is Classification.NEGATIVE:
            return classify(z2, z1, spec)
    raise SamplingError("failed to draw a positive pair of cuts")


def random_null_pair(
    spec: SpectralDecomposition, rng
) -> tuple[CutCirclePoint, CutCirclePoint]:
    """Two distinct cuts inside the same angular gap (a null pair)."""
    gaps = _gap_list(spec)
    gen = _as_generator(rng)
    gap = gaps[int(gen.integers(len(gaps)))]
    for _ in range(MAX_TRIES):
        z1 = random_cut_in_gap(gap, gen)
        z2 = random_cut_in_gap(gap, gen)
        if abs(z1.value - z2.value) > 1e-6:
            return z1, z2
    raise SamplingError("failed to draw a distinct null pair")


def descending_cuts(
    spec: SpectralDecomposition, rng, count: int
) -> list[CutCirclePoint]:
    """Cuts in distinct gaps, sorted descending in the circular order."""
    cuts = random_cuts(spec, rng, count)
    return sorted(cuts, key=lambda c: -c.angle)
