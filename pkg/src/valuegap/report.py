"""Named scenarios, report documents and their JSON / CSV renderings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from valuegap import hilbert, kretschmer, pathology, socp
from valuegap.convex import (FnOracle, check_positive_homogeneity, check_subadditivity,
                             liminf_along, subdiff_zero_membership, SequenceWitness)
from valuegap.extended import ExtendedReal
from valuegap.lp import DualityReport, solve
from valuegap.sparse import SparseSeq

FORMATS = ("json", "csv")


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# -- parameter parsing ----------------------------------------------------

def _rational(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v).strip())


def _nat(v) -> int:
    n = int(v)
    if n < 0:
        raise ValueError("must be >= 0")
    return n


def _list(conv) -> Callable:
    def parse(v):
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        return [conv(x) for x in str(v).split(",") if x.strip()]
    return parse


def _mode(v) -> str:
    if v not in kretschmer.MODES:
        raise ValueError(f"must be one of {', '.join(kretschmer.MODES)}")
    return v


PARSERS: Dict[str, Callable] = {
    "alpha": _rational, "delta": _rational, "gamma": _list(_rational),
    "cells": _nat, "mode": _mode, "levels": _list(_nat), "eps": _rational,
    "eta0": _rational, "eta1": _rational, "trunc": _nat, "witness-m": _nat,
    "y": _list(_rational), "b-file": str, "samples": _nat,
}

# scenario -> parameter defaults (None: optional, no default)
SCENARIOS: Dict[str, Dict[str, Any]] = {
    "sublinear-checks": {"alpha": "2", "cells": 8, "trunc": 16, "samples": 200},
    "pathology": {"witness-m": 32},
    "soc": {"y": "5,3,0", "samples": 20, "witness-m": 64},
    "hilbert": {"trunc": 16, "witness-m": 16, "samples": 50},
    "kretschmer": {"alpha": "2", "delta": "1/2", "gamma": None, "cells": 8, "mode": "exact", "b-file": None},
    "kretschmer-gap": {"alpha": "2", "delta": "0", "gamma": "0", "cells": 8},
    "unbounded": {"alpha": "2", "eta0": "1/4", "eta1": "1/2", "eps": "1", "levels": "4,8", "cells": None},
    "discontinuity": {"alpha": "2", "delta": "1/4", "levels": "2,4,6", "gamma": None, "cells": None},
}

DEFAULT_TOL = {"hilbert": Fraction(1, 10**12), "unbounded": Fraction(1, 10**6)}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: Dict[str, Any] = field(default_factory=dict)
    tol: Optional[Fraction] = None
    seed: int = 0
    format: str = "json"

    @classmethod
    def make(cls, scenario: str, params: Optional[Dict[str, Any]] = None, tol=None,
             seed: int = 0, format: str = "json") -> "ScenarioConfig":
        """Validate, parse and fill in defaults."""
        if scenario not in SCENARIOS:
            raise ConfigError("scenario", f"unknown scenario {scenario!r}")
        if format not in FORMATS:
            raise ConfigError("format", f"must be one of {', '.join(FORMATS)}")
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed", "must be a natural number")
        allowed = SCENARIOS[scenario]
        given = dict(params or {})
        resolved = {}
        for name in given:
            if name not in allowed:
                raise ConfigError(name, f"not a parameter of scenario {scenario!r}")
        for name, default in allowed.items():
            raw = given.get(name, default)
            if raw is None:
                resolved[name] = None
                continue
            try:
                resolved[name] = PARSERS[name](raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(name, f"cannot parse {raw!r}: {exc}") from None
        if tol is not None:
            try:
                tol = _rational(tol)
            except (ValueError, ZeroDivisionError):
                raise ConfigError("tol", f"cannot parse {tol!r}") from None
            if tol < 0:
                raise ConfigError("tol", "must be >= 0")
        return cls(scenario, resolved, tol, seed, format)

    @property
    def effective_tol(self) -> Fraction:
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL.get(self.scenario, Fraction(0))


# -- report document ------------------------------------------------------

@dataclass
class Report:
    scenario: str
    parameters: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    references: List[Dict[str, Any]] = field(default_factory=list)
    checks: List[Dict[str, Any]] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "pass": bool(passed), "detail": detail})
        return bool(passed)

    def reference(self, label: str, **values) -> None:
        self.references.append({"label": label, **values})

    def absorb(self, dr: DualityReport) -> None:
        for c in dr.checks:
            self.checks.append(dict(c))

    @property
    def failed(self) -> bool:
        return not all(c["pass"] for c in self.checks)


def run(config: ScenarioConfig) -> Report:
    p = config.params
    rep = Report(config.scenario, {**p, "tol": config.effective_tol, "seed": config.seed})
    RUNNERS[config.scenario](rep, p, config)
    return rep


def _s(v) -> str:
    return str(jsonable(v))


# -- scenarios ------------------------------------------------------------

def _sublinear(rep: Report, p, cfg: ScenarioConfig) -> None:
    n, seed, tol = p["samples"], cfg.seed, cfg.effective_tol
    scales = [Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(7, 2), Fraction(5)]
    oracles: List[FnOracle] = [
        socp.value_oracle(),
        hilbert.value_oracle(hilbert.HilbertModel(p["trunc"])),
        kretschmer.value_oracle(p["alpha"], p["cells"]),
    ] + [pathology.restricted_oracle(k) for k in pathology.KINDS]
    for f in oracles:
        h = check_positive_homogeneity(f, n, scales, tol=tol, seed=seed)
        s = check_subadditivity(f, n, tol=tol, seed=seed + 1)
        rep.results[f.name] = {"homogeneity_checked": h.checked, "subadditivity_checked": s.checked,
                               "homogeneity_failures": len(h.witnesses),
                               "subadditivity_failures": len(s.witnesses)}
        rep.check(f"{f.name}: positive homogeneity", h.passed, f"{h.checked} evaluations")
        rep.check(f"{f.name}: subadditivity", s.passed, f"{s.checked} pairs")


def _pathology(rep: Report, p, cfg: ScenarioConfig) -> None:
    horizon = p["witness-m"]
    g3 = pathology.restricted_oracle("g3")
    x = pathology.e(1, -1)
    usc = liminf_along(g3, x, pathology.usc_witness(x), horizon)
    lsc = liminf_along(g3, x, pathology.lsc_witness(x), horizon)
    zero = SparseSeq()
    lsc0 = liminf_along(g3, zero, pathology.lsc_witness(zero), horizon)
    rep.results["x"] = "-e_1"
    rep.results["g3_at_x"] = usc.f_at_base
    rep.results["usc_witness"] = {"along": usc.limsup_estimate, "at_base": usc.f_at_base,
                                  "gap": usc.limsup_estimate - usc.f_at_base}
    rep.results["lsc_witness"] = {"along": lsc.liminf_estimate, "at_base": lsc.f_at_base,
                                  "gap": lsc.f_at_base - lsc.liminf_estimate}
    rep.results["lsc_witness_at_zero"] = {"along": lsc0.liminf_estimate, "at_base": lsc0.f_at_base,
                                          "gap": lsc0.f_at_base - lsc0.liminf_estimate}
    rep.reference("g3 along x'_n is constant 0", value=Fraction(0))
    rep.reference("g3 along x''_n equals phi(x) - 1", value=pathology.phi(x) - 1)
    rep.check("usc witness stays at 0 above g3(x)", usc.usc_violated and usc.limsup_estimate == 0,
              f"{_s(usc.limsup_estimate)} vs {_s(usc.f_at_base)}")
    rep.check("lsc witness drops by exactly 1", lsc.lsc_violated and lsc.f_at_base - lsc.liminf_estimate == 1,
              f"{_s(lsc.liminf_estimate)} vs {_s(lsc.f_at_base)}")
    rep.check("lsc violated at 0 with gap 1", lsc0.lsc_violated and lsc0.f_at_base - lsc0.liminf_estimate == 1)
    refuted = 0
    candidates = [SparseSeq(), pathology.e(1), pathology.e(2, -3), pathology.e(1, 2) + pathology.e(4, 5)]
    for xs in candidates:
        m = subdiff_zero_membership(g3, xs, 20, seed=cfg.seed,
                                    extra_points=pathology.refutation_points(xs))
        refuted += not m.accepted
    rep.results["subdifferential_candidates_refuted"] = refuted
    rep.check("no finitely supported functional lies in the subdifferential of g3 at 0",
              refuted == len(candidates), f"{refuted}/{len(candidates)} refuted")


def _soc(rep: Report, p, cfg: ScenarioConfig) -> None:
    if len(p["y"]) != 3:
        raise ConfigError("y", "needs three comma-separated components")
    y = socp.point(*p["y"])
    v = socp.value(y)
    bic = socp.biconjugate_value(y)
    rep.results["y"] = list(y)
    rep.results["value"] = v
    rep.results["biconjugate"] = bic
    rep.results["brute_value"] = socp.brute_value(y)
    lim = liminf_along(socp.value_oracle(), y, SequenceWitness(socp.zeta(y), "zeta_n"), p["witness-m"])
    rep.results["liminf_along_zeta"] = lim.liminf_estimate
    rep.results["lsc_violated"] = lim.lsc_violated
    rep.reference("closed form: 0 if y3 < 0, y2 if y3 = 0 <= y2, else +inf", value=v)
    rep.reference("biconjugate: 0 if y3 <= 0, else +inf", value=bic)
    rep.check("brute force agrees with the closed form",
              _close(rep.results["brute_value"], v, Fraction(1, 20)))
    rep.check("biconjugate below value", bic <= v)
    if y[2] == 0 and y[1] > 0:
        rep.check("lsc violated along zeta_n", lim.lsc_violated,
                  f"liminf {_s(lim.liminf_estimate)} vs value {_s(v)}")
    count = p["samples"]
    pts = socp.sample_brute_points(count, cfg.seed)
    worst = max((abs(float(socp.value(q).value) - float(socp.brute_value(q, box=(-10, 10, 10)).value))
                 for q in pts), default=0.0)
    rep.results["brute_max_error"] = worst
    rep.check("brute force on sampled domain points", worst <= 0.05, f"{count} points, max error {worst:.3g}")


def _close(a: ExtendedReal, b: ExtendedReal, tol) -> bool:
    if a.is_finite and b.is_finite:
        return abs(a.value - b.value) <= tol
    return a == b


def _hilbert(rep: Report, p, cfg: ScenarioConfig) -> None:
    m = hilbert.HilbertModel(p["trunc"])
    tol = cfg.effective_tol
    ys = hilbert.sample_domain(m, p["samples"], cfg.seed)
    worst, unique = Fraction(0), True
    for y in ys:
        lp = hilbert.truncated_lp(m, y)
        sol = solve(lp)
        worst = max(worst, abs(sol.value.value - hilbert.value(m, y).value))
        unique &= hilbert.feasible_set_is_singleton(lp, sol) and sol.primal == hilbert.recover_primal(m, y)
    rep.results["lp_max_abs_error"] = worst
    rep.check("closed form matches the truncated LP", worst <= tol, f"{len(ys)} right-hand sides")
    rep.check("recovered primal is the unique feasible point", unique)
    lb = hilbert.dual_norm_lower_bound(m)
    rep.results["dual_norm_lower_bound"] = lb
    rep.reference("sqrt(N - 1/3) lower estimate", value=math.sqrt(m.trunc - 1 / 3))
    rep.check("dual norm bound >= sqrt(N - 1/3)", lb >= math.sqrt(m.trunc - 1 / 3))
    terms = hilbert.lsc_failure_witness(m, (), min(p["witness-m"], m.trunc))
    table = []
    ok = True
    for t in terms[1:]:
        H = float(hilbert.harmonic(t.m))
        ok &= t.value <= -0.8 * math.sqrt(H) and t.distance <= 1.3 / math.sqrt(H)
        table.append({"m": t.m, "value": t.value, "value_bound": t.value_bound, "distance": t.distance})
    rep.results["lsc_witness"] = table
    rep.check("witness values fall like -sqrt(H_m) while b_m -> 0", ok, f"m = 1..{len(table)}")


def _load_b(p) -> kretschmer.GridFn:
    if p["b-file"] is not None:
        try:
            return kretschmer.read_gridfn(p["b-file"])
        except (OSError, ValueError) as exc:
            raise ConfigError("b-file", str(exc)) from None
    try:
        return kretschmer.b_indicator(p["cells"], p["delta"], p["gamma"][0] if p["gamma"] else None)
    except kretschmer.GridError as exc:
        raise ConfigError("cells", str(exc)) from None


def _analytic(alpha, delta, gamma) -> Optional[kretschmer.AnalyticValues]:
    try:
        return kretschmer.analytic_values(alpha, delta, gamma)
    except kretschmer.OutOfRange:
        return None


def _kretschmer(rep: Report, p, cfg: ScenarioConfig) -> None:
    b = _load_b(p)
    alpha = p["alpha"]
    prob = kretschmer.KretschmerProblem(alpha, b, p["mode"])
    if alpha == 0:
        v, att = kretschmer.value_alpha_zero(b)
        rep.results.update(primal=v, dual=kretschmer.dual_value(0, b), attained=att)
        rep.check("alpha = 0: discrete value is 0", kretschmer.primal_value(0, b) == 0)
        return
    pr = kretschmer.solve_primal(prob)
    du = kretschmer.solve_dual(prob)
    rep.results.update(cells=b.cells, mode=p["mode"], primal=pr.value, dual=du.value,
                       bracket=pr.value - du.value)
    if p["b-file"] is None:
        a = _analytic(alpha, p["delta"], p["gamma"][0] if p["gamma"] else None)
        if a is not None:
            rep.reference("closed-form primal value", value=a.valP)
            rep.reference("closed-form dual value", value=a.valD)
            rep.results["primal_attained"] = a.primal_attained
            if p["mode"] == "exact":
                rep.check("discrete primal bounds val(P) from above", pr.value >= a.valP)
            rep.check("discrete dual bounds val(D) from below", du.value <= a.valD)
    rep.check("discrete dual <= discrete primal", du.value <= pr.value or p["mode"] == "sampled")


def _kretschmer_gap(rep: Report, p, cfg: ScenarioConfig) -> None:
    alpha, delta = p["alpha"], p["delta"]
    if not p["gamma"] or len(p["gamma"]) != 1:
        raise ConfigError("gamma", "needs exactly one value")
    gamma = p["gamma"][0]
    try:
        a = kretschmer.analytic_values(alpha, delta, gamma)
        b = kretschmer.b_indicator(p["cells"], delta, gamma)
    except kretschmer.OutOfRange as exc:
        raise ConfigError("alpha" if alpha <= 0 else "gamma", str(exc)) from None
    except kretschmer.GridError as exc:
        raise ConfigError("cells", str(exc)) from None
    prob = kretschmer.KretschmerProblem(alpha, b, "exact")
    pr = kretschmer.solve_primal(prob)
    du = kretschmer.solve_dual(prob)
    sampled = kretschmer.primal_value(alpha, b, "sampled")
    dr = DualityReport("kretschmer-gap", pr.solution, du.solution,
                       ExtendedReal.of(a.valP), ExtendedReal.of(a.valD))
    rep.results.update(analytic={"valP": a.valP, "valD": a.valD}, discrete={"valP": pr.value, "valD": du.value},
                       sampled_primal=sampled, gap=pr.value - du.value, cells=b.cells)
    rep.reference("two-interval closed form: val(P) = alpha", value=a.valP)
    rep.reference("two-interval closed form: val(D) = min(1, alpha)", value=a.valD)
    dr.add_check("discrete primal equals val(P)", pr.value == a.valP, f"{_s(pr.value)} vs {_s(a.valP)}")
    dr.add_check("discrete dual equals val(D)", du.value == a.valD, f"{_s(du.value)} vs {_s(a.valD)}")
    dr.add_check("gap equals val(P) - val(D)", pr.value - du.value == a.gap, f"gap {_s(a.gap)}")
    dr.add_check("sampled primal <= exact primal", sampled <= pr.value)
    rep.absorb(dr)


def _unbounded(rep: Report, p, cfg: ScenarioConfig) -> None:
    tol = float(cfg.effective_tol)
    rows, prev = [], None
    increasing = True
    for level in p["levels"]:
        grid = p["cells"] or 2 ** (level + 2)
        try:
            w = kretschmer.unboundedness_witness(p["alpha"], p["eta0"], p["eta1"], level, p["eps"], grid)
        except kretschmer.GridError as exc:
            raise ConfigError("cells", f"{exc} at level {level}") from None
        except ValueError as exc:
            raise ConfigError(str(exc).split()[0], str(exc)) from None
        rows.append({"level": level, "cells": grid, "analytic_bound": w.analytic_bound,
                     "discrete_value": w.discrete_value, "norm": w.norm, "ess_sup": w.ess_sup})
        rep.check(f"level {level}: discrete value >= analytic bound",
                  float(w.discrete_value) >= w.analytic_bound - tol,
                  f"{float(w.discrete_value):.6g} vs {w.analytic_bound:.6g}")
        if prev is not None:
            increasing &= w.discrete_value > prev
        prev = w.discrete_value
    rep.results["levels"] = rows
    rep.reference("lower bound eta0 (-1 + 2^{n/4} eps)", value=[r["analytic_bound"] for r in rows])
    rep.check("values strictly increase with the level", increasing)


def _discontinuity(rep: Report, p, cfg: ScenarioConfig) -> None:
    alpha, delta = p["alpha"], p["delta"]
    gammas = p["gamma"] or [1 - Fraction(1, 2**k) for k in p["levels"]]
    rows = []
    for g in gammas:
        grid = p["cells"] or 4 * max(g.denominator, Fraction(delta).denominator)
        try:
            out = kretschmer.discontinuity_scenario(alpha, delta, [g], grid)
        except kretschmer.GridError as exc:
            raise ConfigError("cells", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("gamma" if "gamma" in str(exc) else "alpha", str(exc)) from None
        row, base = out
        bound = delta + Fraction(1, 2 * grid)
        rows.append({"gamma": g, "cells": grid, "perturbation_norm_sq": row.perturbation_norm_sq,
                     "perturbation_norm": row.perturbation_norm, "discrete_valP": row.discrete_valP,
                     "base_valP": base.discrete_valP, "jump": row.discrete_valP - base.discrete_valP})
        rep.check(f"gamma={_s(g)}: discrete valP equals alpha", row.discrete_valP == alpha)
        rep.check(f"gamma={_s(g)}: base value <= delta + 1/(2n)", base.discrete_valP <= bound)
        rep.check(f"gamma={_s(g)}: jump >= alpha - delta - 1/(2n)",
                  row.discrete_valP - base.discrete_valP >= alpha - bound)
    rep.results["rows"] = rows
    rep.reference("value at the perturbed points: alpha", value=alpha)
    rep.reference("value at the base point: min(delta, alpha)", value=min(Fraction(delta), alpha))


RUNNERS: Dict[str, Callable] = {
    "sublinear-checks": _sublinear,
    "pathology": _pathology,
    "soc": _soc,
    "hilbert": _hilbert,
    "kretschmer": _kretschmer,
    "kretschmer-gap": _kretschmer_gap,
    "unbounded": _unbounded,
    "discontinuity": _discontinuity,
}


# -- rendering ------------------------------------------------------------

def jsonable(v):
    """Map report values to JSON values: rationals to "p/q", reals to 12 digits."""
    if isinstance(v, ExtendedReal):
        return jsonable(v.value) if v.is_finite else ("+inf" if v.tag == "pos-inf" else "-inf")
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, SparseSeq):
        return {str(k): jsonable(x) for k, x in v}
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_document(rep: Report) -> dict:
    return jsonable({
        "scenario": rep.scenario,
        "parameters": rep.parameters,
        "results": rep.results,
        "references": rep.references,
        "checks": rep.checks,
    })


def _flatten(prefix: str, v, out: list) -> None:
    if isinstance(v, dict):
        for k in sorted(v):
            _flatten(f"{prefix}.{k}" if prefix else k, v[k], out)
    elif isinstance(v, list):
        for i, x in enumerate(v):
            _flatten(f"{prefix}.{i}", x, out)
    elif isinstance(v, (int, float)) and not isinstance(v, bool):
        out.append((prefix, v))
    elif isinstance(v, str) and (v in ("+inf", "-inf") or _is_ratio(v)):
        out.append((prefix, v))


def _is_ratio(s: str) -> bool:
    num, sep, den = s.partition("/")
    return bool(sep) and num.lstrip("-").isdigit() and den.isdigit()


def render(rep: Report, fmt: str = "json") -> str:
    doc = to_document(rep)
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", doc["scenario"]])
        rows: list = []
        _flatten("", doc["results"], rows)
        for k, v in rows:
            w.writerow([k, v])
        for c in doc["checks"]:
            w.writerow([f"check.{c['name']}", "pass" if c["pass"] else "fail", c["detail"]])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")
