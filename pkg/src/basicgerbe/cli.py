"""Command-line harness: randomized verification suites and point evaluation.

``verify`` runs a named property suite over seeded random instances and
writes a JSON report (byte-identical for identical config and seed).
``eval`` computes a single quantity from a JSON point file, with a
cross-method oracle residual unless suppressed.

Exit codes: 0 pass, 1 check failure, 2 input error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import fibers, forms, projectors, sampling, weyl
from .contour import CutCirclePoint
from .errors import GerbeError, SchemaError
from .linalg import (
    TangentVector,
    UnitaryMatrix,
    embed_block,
    embed_tangent,
    matrix_from_json,
    matrix_to_json,
    random_unitary,
    spectral_decompose,
    tangent_random,
)
from .projectors import Classification, classify

DEFAULT_DIM = 4
DEFAULT_SAMPLES = 500
DEFAULT_SEED = 0


@dataclass
class SuiteConfig:
    suite: str
    dim: int = DEFAULT_DIM
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    report_path: str | None = None

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ValueError(
                f"unknown suite {self.suite!r}; choose from {sorted(SUITES)}"
            )
        if self.dim < 1 or self.samples < 1:
            raise ValueError("dim and samples must be positive")


class _Checks:
    """Accumulates per-check absolute errors during a suite run."""

    def __init__(self, cfg: SuiteConfig, defaults: dict):
        self.cfg = cfg
        self.defaults = defaults
        self.errors: dict[str, list[float]] = {name: [] for name in defaults}

    def add(self, name: str, err: float) -> None:
        self.errors[name].append(float(err))

    def results(self) -> list[dict]:
        out = []
        for name, (identity, tol) in self.defaults.items():
            tol = float(self.cfg.tolerances.get(name, tol))
            errs = self.errors[name]
            failures = sum(1 for e in errs if e > tol)
            out.append(
                {
                    "name": name,
                    "identity": identity,
                    "samples": len(errs),
                    "max_abs_error": max(errs) if errs else 0.0,
                    "mean_abs_error": (sum(errs) / len(errs)) if errs else 0.0,
                    "tolerance": tol,
                    "failures": failures,
                }
            )
        return out


def _max_abs(m) -> float:
    return float(np.max(np.abs(m)))


# ---------------------------------------------------------------------------
# suites


def _suite_projectors(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "residue-vs-quadrature": (
                "arc projector: eigenprojector sum vs resolvent contour integral",
                1e-10,
            ),
            "projector-algebra": (
                "arc projector idempotent and Hermitian",
                1e-10,
            ),
            "integer-trace": ("trace of the arc projector is an integer", 1e-10),
            "derivative-residue-vs-fd": (
                "projector derivative: residue formula vs central differences",
                1e-6,
            ),
            "derivative-off-diagonal": (
                "P dP P = 0 and dP = P dP (1-P) + (1-P) dP P",
                1e-10,
            ),
            "derivative-sum-zero": (
                "sum of single-eigenvalue projector derivatives vanishes",
                1e-10,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        ctx = sampling.random_positive_context(spec, rng)
        x = tangent_random(g, rng)

        p_res = projectors.arc_projector(ctx, "residue")
        p_quad = projectors.arc_projector(ctx, "quadrature")
        checks.add("residue-vs-quadrature", _max_abs(p_res - p_quad))
        checks.add(
            "projector-algebra",
            max(_max_abs(p_res @ p_res - p_res), _max_abs(p_res - p_res.conj().T)),
        )
        tr = complex(np.trace(p_res))
        checks.add("integer-trace", abs(tr - round(tr.real)))

        dp = projectors.projector_derivative(ctx, x)
        dp_fd = projectors.projector_derivative(ctx, x, method="fd")
        checks.add("derivative-residue-vs-fd", _max_abs(dp - dp_fd))
        q = np.eye(cfg.dim) - p_res
        checks.add(
            "derivative-off-diagonal",
            max(
                _max_abs(p_res @ dp @ p_res),
                _max_abs(dp - p_res @ dp @ q - q @ dp @ p_res),
            ),
        )
        total = sum(
            projectors.single_projector_derivative(spec, k, x)
            for k in range(spec.count)
        )
        checks.add("derivative-sum-zero", _max_abs(total))
    return checks


def _suite_curvature(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "three-route": (
                "curvature: tr(P dP dP) vs contour quadrature vs residue form",
                1e-8,
            ),
            "projector-insertion": (
                "projector-inserted contour integral equals the curvature",
                1e-9,
            ),
            "torus-directions": ("curvature vanishes on commuting directions", 1e-10),
            "bilinear-antisymmetric": (
                "curvature antisymmetric and bilinear in the tangents",
                1e-10,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        ctx = sampling.random_positive_context(spec, rng)
        x = tangent_random(g, rng)
        y = tangent_random(g, rng)
        f1 = forms.curvature_via_projectors(ctx, x, y)
        f2 = forms.curvature_via_contour(ctx, x, y, "residue")
        f3 = forms.curvature_via_contour(ctx, x, y, "quadrature")
        checks.add("three-route", max(abs(f1 - f2), abs(f1 - f3), abs(f2 - f3)))
        checks.add(
            "projector-insertion",
            abs(forms.projector_inserted_curvature(ctx, x, y) - f2),
        )

        # a direction commuting with g: a function of g itself
        a_comm = 1j * (spec.matrix + spec.matrix.conj().T)
        a_comm /= max(1.0, np.linalg.norm(a_comm))
        xc = TangentVector(g, a_comm)
        checks.add("torus-directions", abs(forms.curvature_via_contour(ctx, xc, xc)))

        s = float(rng.uniform(0.5, 2.0))
        xs = TangentVector(g, s * x.direction)
        checks.add(
            "bilinear-antisymmetric",
            max(
                abs(f2 + forms.curvature_via_contour(ctx, y, x)),
                abs(forms.curvature_via_contour(ctx, xs, y) - s * f2),
            ),
        )
    return checks


def _suite_delta_curving(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "residue-vs-quadrature": (
                "curving: residue closed form vs log-weighted contour quadrature",
                1e-9,
            ),
            "contour-deformation": (
                "curving quadrature unchanged under contour deformation",
                1e-10,
            ),
            "cut-derivative-zero": (
                "derivative of the curving in the cut direction vanishes",
                1e-6,
            ),
            "delta-positive": (
                "difference of curvings across a positive pair equals the curvature",
                1e-8,
            ),
            "delta-null": ("difference of curvings across a null pair vanishes", 1e-8),
            "delta-swap": ("delta of the curving flips sign under cut swap", 1e-10),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        x = tangent_random(g, rng)
        y = tangent_random(g, rng)
        ctx = sampling.random_positive_context(spec, rng)
        z1, z2 = ctx.z1, ctx.z2

        f_res = forms.curving_eval(z1, spec, x, y, "residue")
        f_quad = forms.curving_eval(z1, spec, x, y, "quadrature")
        checks.add("residue-vs-quadrature", abs(f_res - f_quad))
        f_quad2 = forms.curving_eval(z1, spec, x, y, "quadrature", rho=0.25)
        checks.add("contour-deformation", abs(f_quad - f_quad2))
        checks.add(
            "cut-derivative-zero",
            abs(forms.curving_z_derivative_fd(z1, spec, x, y)),
        )

        delta = forms.delta_pairs(forms.curving_eval, z1, z2, spec, x, y)
        curv = forms.curvature_via_projectors(ctx, x, y)
        checks.add("delta-positive", abs(delta - curv))
        checks.add(
            "delta-swap",
            abs(delta + forms.delta_pairs(forms.curving_eval, z2, z1, spec, x, y)),
        )
        w1, w2 = sampling.random_null_pair(spec, rng)
        checks.add(
            "delta-null",
            abs(forms.delta_pairs(forms.curving_eval, w1, w2, spec, x, y)),
        )
    return checks


def _suite_three_curvature(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "fd-exterior-derivative": (
                "exterior derivative of the curving equals 2 pi i times the "
                "basic three-form",
                1e-4,
            ),
            "raw-vs-simplified": (
                "pulled-back three-curvature: raw two-term sum vs simplified form",
                1e-9,
            ),
            "closed-vs-group": (
                "pulled-back three-curvature matches the group three-form",
                1e-8,
            ),
        },
    )
    fd_samples = max(1, cfg.samples // 5)
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        pt = weyl.sample_regular(cfg.dim, rng)
        tans = [weyl.random_flag_tangent(pt, rng) for _ in range(3)]
        raw, simplified = weyl.pullback_nu_closed(pt, *tans)
        checks.add("raw-vs-simplified", abs(raw - simplified))
        g = weyl.weyl_apply(pt)
        omega = forms.three_curvature(g, *(weyl.weyl_tangent(t) for t in tans))
        checks.add("closed-vs-group", abs(raw - omega))

        if i < fd_samples:
            gg, spec = sampling.well_separated_unitary(cfg.dim, rng)
            z = sampling.random_cuts(spec, rng, 1)[0]
            xs = [tangent_random(gg, rng) for _ in range(3)]
            d_fd = forms.exterior_derivative_fd(
                forms.curving_form_on_group(z), gg, *xs
            )
            checks.add(
                "fd-exterior-derivative",
                abs(d_fd - forms.three_curvature(gg, *xs)),
            )
    return checks


def _suite_weyl(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "preimage-count": (
                "the parametrization has n! preimages over a regular element",
                0.5,
            ),
            "mc-pullback": (
                "pullback of the Maurer-Cartan form matches its closed form",
                1e-10,
            ),
            "pullback-curving": (
                "closed pulled-back curving matches the curving at the image",
                1e-8,
            ),
            "df-closed-vs-raw": (
                "closed exterior-derivative form equals the raw pulled-back "
                "three-curvature",
                1e-9,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        pt = weyl.sample_regular(cfg.dim, rng)
        g = weyl.weyl_apply(pt)
        checks.add(
            "preimage-count",
            abs(weyl.preimage_count(g) - math.factorial(cfg.dim)),
        )
        tans = [weyl.random_flag_tangent(pt, rng) for _ in range(3)]
        # exact linearization of sum lambda_i P_i
        t = tans[0]
        dg = np.einsum("i,ijk->jk", t.dlam, pt.projections) + np.einsum(
            "j,jkl->kl", pt.torus_values, t.dP
        )
        checks.add("mc-pullback", _max_abs(weyl.weyl_tangent(t).ambient - dg))

        spec = spectral_decompose(g)
        z = sampling.random_cuts(spec, rng, 1)[0]
        closed = weyl.pullback_curving_closed(pt, z, tans[0], tans[1])
        direct = forms.curving_eval(
            z, spec, weyl.weyl_tangent(tans[0]), weyl.weyl_tangent(tans[1])
        )
        checks.add("pullback-curving", abs(closed - direct))

        raw, _ = weyl.pullback_nu_closed(pt, *tans)
        checks.add(
            "df-closed-vs-raw", abs(weyl.pullback_df_closed(pt, *tans) - raw)
        )
    return checks


def _suite_equivariance(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "projector-conjugation": (
                "arc projector commutes with conjugation of the group element",
                1e-9,
            ),
            "product-conjugation": (
                "fiber conjugation commutes with the gerbe product",
                1e-9,
            ),
            "section-conjugation": (
                "the multiplication section is conjugation invariant",
                1e-9,
            ),
            "fiber-map-products": (
                "the flag-torus fiber map respects gerbe products",
                1e-9,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        k = random_unitary(cfg.dim, rng)
        z1, z2, z3 = sampling.descending_cuts(spec, rng, 3)
        gk = g.conjugate_by(k)
        speck = spectral_decompose(gk)

        ctx = classify(z1, z2, spec)
        ctxk = classify(z1, z2, speck)
        if ctx.classification is Classification.NEGATIVE:
            ctx, ctxk = ctx.swapped(), ctxk.swapped()
        if ctx.classification is Classification.POSITIVE:
            p = projectors.arc_projector(ctx)
            pk = projectors.arc_projector(ctxk)
            checks.add(
                "projector-conjugation",
                _max_abs(pk - k.mat @ p @ k.mat.conj().T),
            )

        a = fibers.random_element(classify(z1, z2, spec), rng)
        b = fibers.random_element(classify(z2, z3, spec), rng)
        lhs = fibers.conjugate_fiber(k, fibers.gerbe_product(a, b))
        rhs = fibers.gerbe_product(
            fibers.conjugate_fiber(k, a), fibers.conjugate_fiber(k, b)
        )
        checks.add("product-conjugation", fibers.same_element(lhs, rhs)[1])
        sv = fibers.section_value(z1, z2, z3, spec)
        svk = fibers.section_value(z1, z2, z3, speck)
        checks.add("section-conjugation", abs(sv.value - svk.value))

        pt = weyl.sample_regular(cfg.dim, rng)
        tmat = UnitaryMatrix(np.diag(pt.torus_values))
        tspec = spectral_decompose(tmat)
        w1, w2, w3 = sampling.descending_cuts(tspec, rng, 3)
        av = fibers.random_element(classify(w1, w2, tspec), rng)
        bv = fibers.random_element(classify(w2, w3, tspec), rng)
        gf = random_unitary(cfg.dim, rng)
        lhs2 = fibers.weyl_line_map(gf, fibers.gerbe_product(av, bv))
        rhs2 = fibers.gerbe_product(
            fibers.weyl_line_map(gf, av), fibers.weyl_line_map(gf, bv)
        )
        checks.add("fiber-map-products", fibers.same_element(lhs2, rhs2)[1])
    return checks


def _suite_gerbe_axioms(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "section-unit-norm": ("the multiplication section has length one", 1e-10),
            "antisymmetry": (
                "section values over argument permutations follow the sign rule",
                1e-9,
            ),
            "associativity": (
                "the gerbe product is associative (the section has trivial delta)",
                1e-9,
            ),
            "norm-multiplicative": ("the gerbe product multiplies norms", 1e-10),
            "swap-pairing": (
                "swap transport pairs to one against the original element",
                1e-9,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        cuts = sampling.descending_cuts(spec, rng, min(4, cfg.dim + 1))
        while len(cuts) < 4:
            w1, w2 = sampling.random_null_pair(spec, rng)
            cuts.extend([w1, w2])
        z1, z2, z3, z4 = cuts[:4]

        sv = fibers.section_value(z1, z2, z3, spec)
        checks.add("section-unit-norm", abs(abs(sv.value) - 1.0))
        base = fibers.section_value(
            *sorted([z1, z2, z3], key=lambda c: -c.angle), spec
        ).value
        worst = 0.0
        for perm in itertools.permutations([z1, z2, z3]):
            sign = fibers._sorted_desc(list(perm))[1]
            got = fibers.section_value(*perm, spec).value
            want = base if sign > 0 else 1.0 / base
            worst = max(worst, abs(got - want))
        checks.add("antisymmetry", worst)

        checks.add(
            "associativity", fibers.associativity_check(z1, z2, z3, z4, spec, rng)
        )

        a = fibers.random_element(classify(z1, z2, spec), rng)
        b = fibers.random_element(classify(z2, z3, spec), rng)
        ab = fibers.gerbe_product(a, b)
        checks.add("norm-multiplicative", abs(ab.norm - a.norm * b.norm))
        if a.kind == "det":
            pairing = fibers.dual_pairing(fibers.swap_transport(a), a)
            checks.add("swap-pairing", abs(pairing - 1.0))
    return checks


def _suite_truncation(cfg: SuiteConfig) -> _Checks:
    checks = _Checks(
        cfg,
        {
            "curvature-invariance": (
                "curvature unchanged under unital block embedding",
                1e-10,
            ),
            "curving-invariance": (
                "curving unchanged under unital block embedding",
                1e-10,
            ),
            "three-form-invariance": (
                "basic three-form unchanged under unital block embedding",
                1e-10,
            ),
            "section-invariance": (
                "section value unchanged under unital block embedding",
                1e-9,
            ),
        },
    )
    for i in range(cfg.samples):
        rng = sampling.sample_rng(cfg.seed, cfg.suite, i)
        g, spec = sampling.well_separated_unitary(cfg.dim, rng)
        ctx = sampling.random_positive_context(spec, rng)
        z1, z2 = ctx.z1, ctx.z2
        x = tangent_random(g, rng)
        y = tangent_random(g, rng)
        w = tangent_random(g, rng)
        big = cfg.dim + int(rng.integers(1, 5))
        ge = embed_block(g, big)
        spece = spectral_decompose(ge)
        xe, ye, we = (embed_tangent(v, big) for v in (x, y, w))
        ctxe = classify(z1, z2, spece)

        checks.add(
            "curvature-invariance",
            abs(
                forms.curvature_via_projectors(ctxe, xe, ye)
                - forms.curvature_via_projectors(ctx, x, y)
            ),
        )
        checks.add(
            "curving-invariance",
            abs(
                forms.curving_eval(z1, spece, xe, ye)
                - forms.curving_eval(z1, spec, x, y)
            ),
        )
        checks.add(
            "three-form-invariance",
            abs(
                forms.basic_three_form(ge, xe, ye, we)
                - forms.basic_three_form(g, x, y, w)
            ),
        )
        z3 = sampling.descending_cuts(spec, rng, 3)[2]
        checks.add(
            "section-invariance",
            abs(
                fibers.section_value(z1, z2, z3, spece).value
                - fibers.section_value(z1, z2, z3, spec).value
            ),
        )
    return checks


SUITES = {
    "projectors": _suite_projectors,
    "curvature-equivalence": _suite_curvature,
    "delta-curving": _suite_delta_curving,
    "three-curvature": _suite_three_curvature,
    "weyl": _suite_weyl,
    "equivariance": _suite_equivariance,
    "gerbe-axioms": _suite_gerbe_axioms,
    "truncation": _suite_truncation,
}


def run_suite(cfg: SuiteConfig) -> dict:
    """Execute a suite and return the report as a JSON-ready dict."""
    cfg.validate()
    checks = SUITES[cfg.suite](cfg).results()
    return {
        "suite": cfg.suite,
        "config": {
            "dim": cfg.dim,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "tolerances": dict(sorted(cfg.tolerances.items())),
        },
        "checks": checks,
        "passed": all(c["failures"] == 0 for c in checks),
    }


# ---------------------------------------------------------------------------
# point evaluation


def _require(obj: dict, key: str, path: str = "$"):
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]


def _cut_from_json(obj, path: str) -> CutCirclePoint:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise SchemaError(path, "expected a cut point as [re, im]")
    try:
        return CutCirclePoint(complex(obj[0], obj[1]))
    except GerbeError as exc:
        raise SchemaError(path, str(exc)) from None


def _unitary_from_json(obj, path: str) -> UnitaryMatrix:
    try:
        return UnitaryMatrix(matrix_from_json(obj, path))
    except GerbeError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(path, str(exc)) from None


def _tangent_from_json(g: UnitaryMatrix, obj, path: str) -> TangentVector:
    try:
        return TangentVector(g, matrix_from_json(obj, path))
    except GerbeError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(path, str(exc)) from None


def _flag_tangents(obj: dict, pt) -> list:
    tans = []
    for i, t in enumerate(_require(obj, "tangents")):
        merged = {
            "lambda": obj["lambda"],
            "projections": obj["projections"],
            "dlambda": _require(t, "dlambda", f"$.tangents[{i}]"),
            "dP": _require(t, "dP", f"$.tangents[{i}]"),
        }
        tans.append(weyl.flag_point_from_json(merged, f"$.tangents[{i}]")[1])
    return tans


def eval_point(obj: dict, quantity: str, method: str, with_oracle: bool) -> dict:
    """Evaluate one quantity at a JSON-described point."""
    record = {"quantity": quantity, "method": method, "residual_vs_oracle": None}

    if "lambda" in obj:
        pt, _ = weyl.flag_point_from_json(obj)
        tans = _flag_tangents(obj, pt)
        if quantity == "curving":
            z = _cut_from_json(_require(obj, "z"), "$.z")
            value = weyl.pullback_curving_closed(pt, z, tans[0], tans[1])
            if with_oracle:
                spec = spectral_decompose(weyl.weyl_apply(pt))
                direct = forms.curving_eval(
                    z, spec, weyl.weyl_tangent(tans[0]), weyl.weyl_tangent(tans[1])
                )
                record["residual_vs_oracle"] = abs(value - direct)
        elif quantity == "nu":
            raw, simplified = weyl.pullback_nu_closed(pt, *tans[:3])
            value = raw / (2j * math.pi)
            if with_oracle:
                record["residual_vs_oracle"] = abs(raw - simplified)
        elif quantity == "df":
            value = weyl.pullback_df_closed(pt, *tans[:3])
            if with_oracle:
                raw, _ = weyl.pullback_nu_closed(pt, *tans[:3])
                record["residual_vs_oracle"] = abs(value - raw)
        else:
            raise SchemaError("$", f"flag-torus input does not support {quantity!r}")
        record.update(value_re=value.real, value_im=value.imag)
        return record

    g = _unitary_from_json(_require(obj, "g"), "$.g")

    if quantity == "projector":
        spec = spectral_decompose(g)
        ctx = classify(
            _cut_from_json(_require(obj, "z1"), "$.z1"),
            _cut_from_json(_require(obj, "z2"), "$.z2"),
            spec,
        )
        mth = "quadrature" if method == "quadrature" else "residue"
        p = projectors.arc_projector(ctx, mth)
        record["method"] = mth
        record["matrix"] = matrix_to_json(p)
        if with_oracle:
            other = "residue" if mth == "quadrature" else "quadrature"
            record["residual_vs_oracle"] = _max_abs(
                p - projectors.arc_projector(ctx, other)
            )
        return record

    if quantity == "section":
        spec = spectral_decompose(g)
        cuts = [
            _cut_from_json(_require(obj, k), f"$.{k}") for k in ("z1", "z2", "z3")
        ]
        sv = fibers.section_value(*cuts, spec)
        record.update(value_re=sv.value.real, value_im=sv.value.imag)
        if with_oracle:
            record["residual_vs_oracle"] = abs(abs(sv.value) - 1.0)
        return record

    if quantity == "nu":
        x, y, w = (
            _tangent_from_json(g, _require(obj, k), f"$.{k}") for k in ("X", "Y", "Z")
        )
        value = forms.basic_three_form(g, x, y, w)
        record.update(value_re=value.real, value_im=value.imag)
        return record

    if quantity == "df":
        z = _cut_from_json(_require(obj, "z"), "$.z")
        x, y, w = (
            _tangent_from_json(g, _require(obj, k), f"$.{k}") for k in ("X", "Y", "Z")
        )
        value = forms.exterior_derivative_fd(forms.curving_form_on_group(z), g, x, y, w)
        record["method"] = "fd"
        record.update(value_re=value.real, value_im=value.imag)
        if with_oracle:
            record["residual_vs_oracle"] = abs(value - forms.three_curvature(g, x, y, w))
        return record

    if quantity == "curvature":
        spec = spectral_decompose(g)
        ctx = classify(
            _cut_from_json(_require(obj, "z1"), "$.z1"),
            _cut_from_json(_require(obj, "z2"), "$.z2"),
            spec,
        )
        x = _tangent_from_json(g, _require(obj, "X"), "$.X")
        y = _tangent_from_json(g, _require(obj, "Y"), "$.Y")
        if method == "fd":
            pos, sign = forms._signed(ctx)
            if sign == 0.0:
                value = 0j
            else:
                p = projectors.arc_projector(pos)
                dpx = projectors.projector_derivative(pos, x, method="fd")
                dpy = projectors.projector_derivative(pos, y, method="fd")
                value = sign * complex(
                    np.trace(p @ dpx @ dpy) - np.trace(p @ dpy @ dpx)
                )
        else:
            value = forms.curvature_via_contour(ctx, x, y, method)
        record.update(value_re=value.real, value_im=value.imag)
        if with_oracle:
            record["residual_vs_oracle"] = abs(
                value - forms.curvature_via_contour(ctx, x, y, "residue")
            )
        return record

    if quantity == "curving":
        spec = spectral_decompose(g)
        z = _cut_from_json(_require(obj, "z"), "$.z")
        x = _tangent_from_json(g, _require(obj, "X"), "$.X")
        y = _tangent_from_json(g, _require(obj, "Y"), "$.Y")
        mth = "quadrature" if method == "quadrature" else "residue"
        value = forms.curving_eval(z, spec, x, y, mth)
        record["method"] = mth
        record.update(value_re=value.real, value_im=value.imag)
        if with_oracle:
            other = "residue" if mth == "quadrature" else "quadrature"
            record["residual_vs_oracle"] = abs(
                value - forms.curving_eval(z, spec, x, y, other)
            )
        return record

    raise SchemaError("$", f"unknown quantity {quantity!r}")


# ---------------------------------------------------------------------------
# entry point


def _parse_tols(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key] = float(val)
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="basicgerbe", description="gerbe identity verification harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a randomized property suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--dim", type=int, default=DEFAULT_DIM)
    v.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument(
        "--tol", action="append", default=[], metavar="NAME=VALUE",
        help="override a check tolerance",
    )
    v.add_argument("--report", default=None, help="write the JSON report here")

    e = sub.add_parser("eval", help="evaluate one quantity at a point")
    e.add_argument("--input", required=True, help="JSON point file")
    e.add_argument(
        "--quantity",
        required=True,
        choices=["curvature", "curving", "nu", "df", "section", "projector"],
    )
    e.add_argument(
        "--method", default="residue", choices=["residue", "quadrature", "fd"]
    )
    e.add_argument("--no-oracle", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            cfg = SuiteConfig(
                suite=args.suite,
                dim=args.dim,
                samples=args.samples,
                seed=args.seed,
                tolerances=_parse_tols(args.tol),
                report_path=args.report,
            )
            report = run_suite(cfg)
            for c in report["checks"]:
                status = "PASS" if c["failures"] == 0 else "FAIL"
                print(
                    f"{status} {report['suite']}/{c['name']}: "
                    f"max {c['max_abs_error']:.3e} tol {c['tolerance']:.0e} "
                    f"({c['samples']} samples, {c['failures']} failures)"
                )
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            if cfg.report_path:
                with open(cfg.report_path, "w") as fh:
                    fh.write(text)
            return 0 if report["passed"] else 1

        with open(args.input) as fh:
            obj = json.load(fh)
        record = eval_point(obj, args.quantity, args.method, not args.no_oracle)
        print(json.dumps(record, indent=2, sort_keys=True))
        return 0
    except (
        SchemaError,
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GerbeError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
