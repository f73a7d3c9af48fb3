"""Suite orchestration and report serialization."""
from __future__ import annotations

import json
import time

import numpy as np

from .. import crossed as cx
from .. import realcx as rx
from ..errors import HypothesisNotMet, NcgxError
from ..groups import GroupHopfData, classify_weight
from ..hochschild import build_orientation, dual_action_on_chain, dual_coaction_components
from ..report import Report
from ..triples import (check_equivariance, check_irreducible, check_nondegenerate, check_order_condition,
                       classify_real_structure, summability_partial_sums, verify_axioms)
from .fixtures import Fixture

REPORT_SCHEMA_ID = "ncgx.report/1"
SUITES = ("axioms", "real", "orders", "crossed", "orientation")
PLUMBING = "plumbing"


def _failure(rep: Report, check_id: str, exc: Exception):
    rep.add(check_id, PLUMBING, False, detail={"error": type(exc).__name__, "message": str(exc)})


def _guard(rep: Report, check_id: str, fn):
    """Run ``fn`` and merge its report; library errors become a failed check."""
    t0 = time.perf_counter()
    n0 = len(rep.checks)
    try:
        out = fn()
        if isinstance(out, Report):
            rep.extend(out)
        return out
    except HypothesisNotMet as exc:
        rep.add(check_id, PLUMBING, True, report_only=True,
                detail={"not applicable": str(exc), "hypothesis": exc.hypothesis})
        return None
    except NcgxError as exc:
        _failure(rep, check_id, exc)
        return None
    finally:
        dt = time.perf_counter() - t0
        for c in rep.checks[n0:]:
            c.wall_time = dt


class Context:
    """Lazily built objects shared between suites of one run."""

    def __init__(self, fx: Fixture, seed: int):
        self.fx = fx
        self.seed = seed
        self._crossed = {}
        self._real = None

    def base_window(self):
        return self.fx.base.interior(self.fx.margin("base", 2))

    def crossed(self, rep_kind: str | None = None):
        rep_kind = rep_kind or self.fx.representation
        if rep_kind not in self._crossed:
            self._crossed[rep_kind] = cx.build_crossed(self.fx.base, self.fx.group, self.fx.weight, rep_kind,
                                                       self.fx.tolerance)
        return self._crossed[rep_kind]

    def real(self):
        if self._real is None:
            self._real = rx.assemble_real_structure(self.crossed(cx.PI2_GAMMA), self.fx.variant,
                                                    self.fx.margin("orders", 2 * self.fx.g_max + 2), self.fx.g_max)
        return self._real


def suite_axioms(ctx: Context, rep: Report):
    fx = ctx.fx
    _guard(rep, "axioms", lambda: verify_axioms(fx.base, ctx.base_window()))
    if fx.base.weight is not None:
        wc = classify_weight(fx.base.weight)
        rep.add("base weight classification", "Dirac weight: bounded translation functions l_g", True,
                report_only=True, detail={"flags": wc.flags, "witnesses": wc.witnesses})
    if fx.base.hilbert_group is not None and fx.base.hilbert_group.is_finite:
        _guard(rep, "nondegenerate", lambda: check_nondegenerate(fx.base))
        _guard(rep, "irreducible", lambda: check_irreducible(fx.base))
    if fx.base.weight is not None or fx.base.hilbert_group is None:
        def sums():
            r = Report()
            r.add("summability partial sums", "p-summability: partial sums of |D|^-p", True, report_only=True,
                  detail={"p=1": summability_partial_sums(fx.base, 1.0), "p=2": summability_partial_sums(fx.base, 2.0)})
            return r
        _guard(rep, "summability", sums)
    if fx.base.unitaries is not None:
        _guard(rep, "equivariance", lambda: check_equivariance(fx.base, GroupHopfData(fx.group, fx.star),
                                                               ctx.base_window()))


def suite_real(ctx: Context, rep: Report):
    fx = ctx.fx
    if fx.base.J is None:
        rep.add("real structure", PLUMBING, True, report_only=True, detail={"note": "fixture has no real structure"})
        return

    def base_signs():
        s = classify_real_structure(fx.base, ctx.base_window())
        r = Report()
        r.add("base KO dimension", "KO-dimension from the signs (eps, eps', eps'')", s.ko is not None,
              detail={"signs": list(s.signs), "ko": sorted(s.ko_dims)})
        return r
    _guard(rep, "base KO dimension", base_signs)
    if fx.variant is None:
        return

    def shift():
        r = ctx.real()
        out = Report()
        anchor = ("real structure of KO-dimension n+1" if r.variant == rx.HAT
                  else "real structure of KO-dimension n-1")
        out.add("KO shift", anchor, r.measured.ko == r.predicted_ko, residual=sign_residual(r.measured),
                threshold=fx.tolerance.threshold(),
                detail={"base_ko": r.base_ko, "predicted_ko": r.predicted_ko, "row": r.row,
                        "measured_signs": list(r.measured.signs), "measured_ko": sorted(r.measured.ko_dims)})
        return out
    if _guard(rep, "KO shift", shift) is None:
        return
    margin = fx.margin("orders", 2 * fx.g_max + 2)
    _guard(rep, "auxiliary j", lambda: rx.check_aux_j_lemma(ctx.real(), margin, fx.g_max))
    G = fx.group
    if ctx.real().variant == rx.HAT and G.is_finite:
        _guard(rep, "J coaction", lambda: rx.check_J_coaction_equivariance(ctx.real()))
    elif G.abelian:
        _guard(rep, "J dual action", lambda: rx.check_J_dual_action(ctx.real(), margin=margin))


def sign_residual(s) -> float:
    """Largest residual among the relations that fixed the measured signs."""
    out = s.residuals.get("zeroth order", 0.0)
    for name, v in (("eps", s.eps), ("eps'", s.eps_prime), ("eps''", s.eps_dprime)):
        if v:
            out = max(out, s.residuals[name + ("+" if v > 0 else "-")])
    return out


def suite_orders(ctx: Context, rep: Report):
    fx = ctx.fx
    if fx.base.J is None:
        rep.add("order conditions", PLUMBING, True, report_only=True, detail={"note": "fixture has no real structure"})
        return
    for k in (0, 1, 2):
        _guard(rep, f"order {k}", lambda k=k: check_order_condition(fx.base, k, ctx.base_window()))
    if fx.variant is None:
        return
    margin = fx.margin("orders", 2 * fx.g_max + 2)
    for k in (0, 1, 2):
        _guard(rep, f"crossed order {k}", lambda k=k: rx.check_crossed_order_conditions(ctx.real(), k, fx.g_max, margin))
    if ctx.crossed(cx.PI2_GAMMA).parity == cx.EVEN_FROM_ODD:
        for k in (0, 1, 2):
            _guard(rep, f"reduced order {k}",
                   lambda k=k: rx.check_reduced_order_conditions(ctx.real(), k, 1, fx.g_max, margin))


def suite_crossed(ctx: Context, rep: Report):
    fx = ctx.fx
    if fx.group is None:
        rep.add("crossed product", PLUMBING, True, report_only=True, detail={"note": "fixture has no group action"})
        return
    margin = fx.margin("crossed", 4)
    for kind in (cx.PI1_LAMBDA, cx.PI2_GAMMA):
        def ident(kind=kind):
            r = cx.check_crossed_identities(ctx.crossed(kind), margin, seed=ctx.seed)
            for c in r.checks:
                c.id = f"{kind}: {c.id}"
            return r
        _guard(rep, f"{kind} identities", ident)
    c = ctx.crossed()
    if fx.group.is_finite:
        _guard(rep, "D_hat spectrum", lambda: cx.dhat_spectrum_check(c))
    _guard(rep, "intertwiner", lambda: cx.intertwiner_residuals(ctx.crossed(cx.PI1_LAMBDA), margin, fx.g_max))
    _guard(rep, "equicontinuity", lambda: cx.check_equicontinuity(fx.base, fx.group))
    if fx.group.is_finite:
        _guard(rep, "dual coaction", lambda: cx.check_dual_symmetry(c, "coaction", g_max=fx.g_max))
    if fx.group.abelian:
        try:
            chars = cx.default_characters(fx.group)
        except NcgxError:
            chars = None
        if chars is not None:
            _guard(rep, "dual action", lambda: cx.check_dual_symmetry(c, "dual_action", chars, margin, fx.g_max))


def suite_orientation(ctx: Context, rep: Report):
    fx = ctx.fx
    if fx.orientation is None:
        rep.add("orientation", PLUMBING, True, report_only=True, detail={"note": "fixture has no orientation block"})
        return

    def orient():
        chain, g = fx.orientation_chain()
        res = build_orientation(chain, ctx.real(), g, base_algebra=fx.algebra, check=False)
        tol = fx.tolerance.threshold()
        r = Report()
        anchor = "the crossed triple admits an orientation cycle c_hat = (1/M) c x_alpha Delta_g"
        r.residual_check("b(c_hat) = 0", anchor, res.boundary_residual, 1e-12,
                         detail={"M": [res.M.real, res.M.imag], "terms": len(res.chain.coeffs)})
        r.residual_check("pi_D(c_hat) = chi_hat", anchor, res.pi_residual, max(tol, 1e-8),
                         detail={"margin": res.margin})
        comps = dual_coaction_components(res.chain)
        G = fx.group
        stray = max((v.max_abs() for k, v in comps.items() if k != G.identity), default=0.0)
        r.residual_check("c_hat dual coaction invariant", "orientation cycle invariant for the dual coaction",
                         stray, 0.0)
        if G.abelian:
            worst = 0.0
            for _, chi in cx.default_characters(G):
                worst = max(worst, (dual_action_on_chain(res.chain, chi) - res.chain).max_abs())
            r.residual_check("c_hat dual action invariant", "orientation cycle invariant for the dual action",
                             worst, 1e-12)
        return r
    _guard(rep, "orientation", orient)


RUNNERS = {"axioms": suite_axioms, "real": suite_real, "orders": suite_orders, "crossed": suite_crossed,
           "orientation": suite_orientation}


def run_suite(fx: Fixture, suite: str = "all", seed: int = 0) -> Report:
    if suite != "all" and suite not in RUNNERS:
        raise ValueError(f"unknown suite {suite!r}")
    rep = Report()
    ctx = Context(fx, seed)
    for name in (SUITES if suite == "all" else (suite,)):
        RUNNERS[name](ctx, rep)
    return rep


def exit_status(rep: Report) -> int:
    return 0 if rep.passed else 1


def _plain(x):
    """JSON-friendly copy with deterministic key order."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple, frozenset, set)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in items]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if x is None or isinstance(x, (int, str)):
        return x
    return str(x)


def report_dict(rep: Report, fixture: str = "", suite: str = "", seed: int = 0, tolerance: float | None = None) -> dict:
    checks = [{"id": c.id, "anchor": c.anchor, "passed": c.passed, "report_only": c.report_only,
               "residual": c.residual, "threshold": c.threshold, "witness": _plain(c.witness),
               "detail": _plain(c.detail)} for c in rep.checks]
    n_info = sum(c.report_only for c in rep.checks)
    n_fail = len(rep.failures())
    return {"schema": REPORT_SCHEMA_ID, "fixture": fixture, "suite": suite, "seed": seed, "tolerance": tolerance,
            "summary": {"checks": len(checks), "failed": n_fail, "passed": len(checks) - n_info - n_fail,
                        "report_only": n_info},
            "exit_status": exit_status(rep), "checks": checks}


def emit(rep: Report, fmt: str = "text", **meta) -> bytes:
    if fmt == "json":
        return (json.dumps(report_dict(rep, **meta), indent=2, sort_keys=True) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    d = report_dict(rep, **meta)
    lines = [c.line() + (f"  [{c.wall_time:.2f}s]" if c.wall_time >= 0.01 else "") for c in rep.checks]
    s = d["summary"]
    lines.append(f"{s['passed']} passed, {s['failed']} failed, {s['report_only']} report-only")
    return ("\n".join(lines) + "\n").encode()
