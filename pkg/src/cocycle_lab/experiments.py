"""Command pipelines: config dict in, Report out."""
from __future__ import annotations

import numpy as np

from . import algebra as alg
from . import euclid, gradient, littlewood_paley as lp, multipliers as mult
from .catalog import catalog, to_right
from .cocycles import (LengthFunction, ball_count_check, build_cocycle, cocycle_residuals,
                       is_conditionally_negative, random_length_function, schoenberg_check,
                       separation_report, SCHOENBERG_GRID)
from .config import ConfigError
from .expr import compile_expression, compile_scalar
from .groups import FiniteGroup, build_named, build_word_ball, is_closed
from .report import Report, load_json, merge_reports
from .seeding import child_rng


# -- inputs ------------------------------------------------------------------

def build_group(desc):
    if desc is None:
        raise ConfigError("required field missing", "/group")
    desc = dict(desc)
    if "path" in desc:
        return FiniteGroup.load(desc["path"])
    kind = desc.pop("kind", None)
    if kind is None:
        raise ConfigError("group needs 'kind' or 'path'", "/group/kind")
    if kind == "word_ball":
        return build_word_ball(desc.get("k", 2), desc.get("radius", 2))
    return build_named(kind, **desc)


def build_inputs(cfg):
    """``(group, psi, cocycle-or-None)`` from the group and psi entries of the config."""
    desc = cfg["psi"]
    if "catalog" in desc:
        params = dict(desc.get("params") or {})
        c = catalog(desc["catalog"], **params)
        if c.side != "left":
            raise ConfigError("psi from a catalog must use the left side", "/psi/params/side")
        return c.group, c.length_function(), c
    group = build_group(cfg.get("group"))
    if "values" in desc:
        return group, LengthFunction(group, desc["values"]), None
    if "random" in desc:
        opts = desc["random"]
        rng = child_rng(cfg["seed"], "psi")
        return group, random_length_function(group, rng, int(opts.get("rank", 1)),
                                             float(opts.get("scale", 1.0))), None
    raise ConfigError("psi needs 'values', 'catalog' or 'random'", "/psi")


def left_cocycle(cfg, psi, c):
    return c if c is not None else build_cocycle(psi, "left", cfg["tolerances"]["rank"])


def _closed(group, command):
    if not is_closed(group):
        raise ConfigError(f"{command} needs a closed finite group", "/group")


# -- commands ------------------------------------------------------------------

def run_check_length(cfg):
    rep = Report("check-length", cfg)
    group, psi, _ = build_inputs(cfg)
    _closed(group, "check-length")
    tol = cfg["tolerances"]
    cert = is_conditionally_negative(psi)
    rep.value("min_eig", cert.min_eig, tol["psd"])
    rep.check("conditionally_negative", cert.passed, cert.min_eig)
    grid = cfg["t_grid"] or SCHOENBERG_GRID
    rows = schoenberg_check(psi, grid, tol["psd"])
    rep.table("schoenberg", [{"t": t, "passed": ok, "min_eig": m} for t, ok, m in rows])
    rep.check("schoenberg", all(ok for _, ok, _ in rows), min(m for _, _, m in rows), tol["psd"])
    return rep


def run_cocycle(cfg):
    rep = Report("cocycle", cfg)
    group, psi, c = build_inputs(cfg)
    tol = cfg["tolerances"]
    side = cfg["side"]
    if c is None:
        c = build_cocycle(psi, side, tol["rank"])
    elif side == "right":
        c = to_right(c)
    res = cocycle_residuals(c)
    rep.value("dim", c.dim)
    for key in ("gram", "length"):
        rep.value(key, res[key], tol["roundtrip"])
        rep.check(key, res[key] <= tol["roundtrip"], res[key], tol["roundtrip"])
    for key in ("law", "orthogonality"):
        rep.value(key, res[key], tol["law"])
        rep.check(key, res[key] <= tol["law"], res[key], tol["law"])
    rep.value("coverage", res["coverage"])
    sep = separation_report(c)
    rep.value("delta", sep.delta, tol["golden"])
    rep.value("injective", sep.injective)
    rep.value("standard", sep.standard)
    if sep.delta > 0:
        rows = ball_count_check(c, cfg["radii"])
        rep.table("ball_count", rows)
        rep.check("counting_bound", all(r["pass"] for r in rows))
    return rep


def run_bmo(cfg):
    rep = Report("bmo", cfg)
    group, psi, _ = build_inputs(cfg)
    _closed(group, "bmo")
    tol = cfg["tolerances"]
    grid = cfg["t_grid"] or alg.BMO_GRID
    rows = []
    worst = 0.0
    for i in range(cfg["num_elements"]):
        f = alg.random_element(group, child_rng(cfg["seed"], "bmo", i))
        r = alg.bmo_norm(psi, f, grid, tol["psd"])
        worst = min(worst, min(r.min_eigs))
        rows.append({"element": f"random{i}", "column": r.column, "row": r.row, "norm": r.norm,
                     "argmax_t": r.argmax_t})
        rep.value(f"bmo/random{i}", r.norm, tol["golden"])
    rep.check("kadison_schwarz", worst >= -tol["psd"], worst, tol["psd"])
    if cfg["characters"]:
        vals = alg.psi_values(psi)
        for g in np.flatnonzero(vals >= 2.0):
            r = alg.bmo_norm(psi, alg.AlgebraElement.delta(group, int(g)), grid, tol["psd"])
            rows.append({"element": f"lambda({int(g)})", "column": r.column, "row": r.row,
                         "norm": r.norm, "argmax_t": r.argmax_t})
            expect = np.sqrt(1 - np.exp(-2 * max(grid) * vals[g]))
            rep.check(f"character/{int(g)}", r.column >= min(tol["bmo_char"], expect - 1e-12)
                      and abs(r.column - expect) <= 1e-9, r.column)
    rep.table("norms", rows)
    return rep


def build_symbol(desc, group, psi, c, cfg):
    kind = desc.get("type", "riesz")
    if kind == "riesz":
        c = left_cocycle(cfg, psi, c)
        eta = desc.get("eta") or np.eye(c.dim)[0].tolist()
        return mult.riesz_symbol(c, eta)
    if kind == "radial":
        return mult.radial_symbol(psi, compile_scalar(desc["h"], "s"))
    if kind == "imaginary_power":
        return mult.imaginary_power_symbol(psi, float(desc["s"]))
    if kind == "lifted":
        c = left_cocycle(cfg, psi, c)
        return mult.lifted_symbol(c, compile_expression(desc["expression"], c.dim))
    if kind == "explicit":
        vals = np.asarray(desc["values"], dtype=np.float64)
        if vals.ndim == 2:
            vals = vals[:, 0] + 1j * vals[:, 1]
        return mult.MultiplierSymbol(group, vals)
    if kind == "constant":
        return mult.constant_symbol(group, desc.get("value", 1.0))
    raise ConfigError(f"unknown symbol type {kind!r}", "/symbol/type")


def run_multiplier(cfg):
    rep = Report("multiplier", cfg)
    group, psi, c = build_inputs(cfg)
    _closed(group, "multiplier")
    tol = cfg["tolerances"]
    m = build_symbol(cfg["symbol"], group, psi, c, cfg)
    exact = mult.l2_norm_exact(m)
    rep.value("l2_exact", exact, tol["golden"])
    for p in cfg["p"]:
        res = mult.lp_norm_search(m, p, cfg["trials"], cfg["steps"], cfg["seed"])
        rep.value(f"lower_bound/p={p}", res.lower_bound, tol["golden"])
        if p == 2:
            rep.check("l2_law", res.lower_bound <= exact + tol["l2"], res.lower_bound, tol["l2"])
    return rep


def run_mihlin(cfg):
    rep = Report("mihlin", cfg)
    fn = compile_expression(cfg["expression"], cfg["n"])
    r = mult.mihlin_check(fn, cfg["n"], cfg["order"], cfg["eps"], cfg["shells"],
                          cfg["directions"], cfg["threshold"], cfg["step_rel"])
    for k in range(r.order + 1):
        rep.value(f"hormander/{k}", r.hormander[k], tol_rel(r.hormander[k]))
        rep.value(f"theorem_a/{k}", r.theorem_a[k], tol_rel(r.theorem_a[k]))
    rep.value("nonfinite", r.nonfinite)
    rep.check("mihlin", r.passed, max(r.hormander), cfg["threshold"])
    return rep


def tol_rel(x, rel=1e-6):
    return rel * max(1.0, abs(x))


def run_lp(cfg):
    rep = Report("lp", cfg)
    group, psi, _ = build_inputs(cfg)
    _closed(group, "lp")
    tol = cfg["tolerances"]
    fam_desc = dict(cfg["family"])
    m_range = None
    if "m_min" in fam_desc or "m_max" in fam_desc:
        m_range = (fam_desc.get("m_min", -4), fam_desc.get("m_max", 4))
    fam = lp.dyadic_family(fam_desc.get("bump", "default"), m_range,
                           fam_desc.get("normalize", True), psi.values)
    rep.value("family", fam.to_json())
    if fam.normalized:
        defect = lp.partition_defect(psi, fam)
        rep.check("partition_of_unity", defect <= tol["plancherel"], defect, tol["plancherel"])
    rows = []
    for p in cfg["p"]:
        ratios = []
        for i in range(cfg["num_samples"]):
            f = alg.random_element(group, child_rng(cfg["seed"], f"lp/p={p}", i))
            sq = lp.square_function_norms(psi, fam, f, p)
            lhs = alg.lp_norm(alg.project_J(psi, f), p)
            ratio = lhs / sq.rc if sq.rc > 0 else None
            ratios.append(ratio)
            rows.append({"group": group.name, "p": p, "column": sq.column, "row": sq.row,
                         "rc": sq.rc, "ratio": ratio})
        finite = [r for r in ratios if r is not None and np.isfinite(r)]
        rep.check(f"finite/p={p}", len(finite) == len(ratios))
        if finite:
            rep.value(f"max_ratio/p={p}", max(finite), tol["golden"])
            rep.check(f"ratio_band/p={p}", 0.1 <= min(finite) and max(finite) <= 10,
                      [min(finite), max(finite)])
        if p == 2:
            dev = max(abs(r - 1) for r in finite) if finite else 0.0
            rep.check("plancherel_p2", dev <= tol["l2"], dev, tol["l2"])
    rep.table("ratios", rows)
    return rep


def run_meyer(cfg):
    rep = Report("meyer", cfg)
    group, psi, c = build_inputs(cfg)
    _closed(group, "meyer")
    tol = cfg["tolerances"]
    c = left_cocycle(cfg, psi, c)
    for i in range(min(cfg["num_samples"], 20)):
        f = gradient.random_trig_polynomial(psi, child_rng(cfg["seed"], "meyer/identity", i))
        a = alg.l2_norm(gradient.generator_apply(psi, f, 0.5)) ** 2
        t = gradient.gamma_gram(c, f, f).coeffs[0].real
        if not rep.check(f"identity/{i}", abs(a - t) <= tol["gamma"], abs(a - t), tol["gamma"]):
            break
    for g in np.flatnonzero(~alg.g0_mask(psi)):
        f = alg.AlgebraElement.delta(group, int(g))
        r = alg.lp_norm(gradient.generator_apply(psi, f, 0.5), 4) / max(
            gradient._gradient_norms(c, f, 4)[:2])
        rep.check(f"character/{int(g)}", abs(r - 1) <= tol["meyer_p2"], r, tol["meyer_p2"])
    for p in cfg["p"]:
        st = gradient.meyer_ratio(psi, c, p, cfg["num_samples"], cfg["seed"])
        rep.value(f"min/p={p}", st["min"], tol["golden"])
        rep.value(f"max/p={p}", st["max"], tol["golden"])
        if p == 2:
            dev = max(abs(r - 1) for r in st["ratios"])
            rep.check("p2_ratios", dev <= tol["meyer_p2"], dev, tol["meyer_p2"])
        else:
            rep.check(f"spread/p={p}", st["max"] / st["min"] <= 50, st["max"] / st["min"])
    return rep


def run_khintchine(cfg):
    rep = Report("khintchine", cfg)
    group, psi, c = build_inputs(cfg)
    _closed(group, "khintchine")
    c = left_cocycle(cfg, psi, c)
    rows = []
    for i in range(cfg["num_samples"]):
        f = gradient.random_trig_polynomial(psi, child_rng(cfg["seed"], "khintchine", i))
        for p in cfg["p"]:
            r = gradient.khintchine_band(psi, c, f, p, cfg["num_z"],
                                         cfg["seed"] + 1000 * i + int(p))
            rows.append({"sample": i, **r})
            rep.check(f"lower/{i}/p={p}", r["lower_ok"], r["ratio"])
            rep.value(f"ratio/{i}/p={p}", r["ratio"], 4 * r["std_error"] / max(r["rc_norm"], 1e-300))
    rep.table("band", rows)
    return rep


def build_fft_symbol(desc):
    kind = desc.get("type", "donut")
    if kind == "donut":
        return euclid.donut_symbol(desc.get("alpha", 1.0), desc.get("beta", 2 ** 0.5),
                                   desc.get("gamma", 0.25))
    if kind == "expression":
        return compile_expression(desc["expression"], 1)
    raise ConfigError(f"unknown symbol type {kind!r}", "/symbol/type")


def run_fft(cfg):
    rep = Report("fft", cfg)
    tol = cfg["tolerances"]
    sym = build_fft_symbol(cfg["symbol"])
    rows = []
    for p in cfg["p"]:
        res = euclid.empirical_norm_sweep(sym, p, cfg["N"], cfg["trials"], cfg["steps"],
                                          cfg["seed"], cfg["scale"])
        rows.extend(res)
        vals = [r["lower_bound"] for r in res]
        for r in res:
            rep.value(f"lower_bound/N={r['N']}/p={p}", r["lower_bound"], tol["golden"])
        if p == 2:
            dev = max(abs(r["lower_bound"] - euclid.exact_l2_norm(sym, r["N"], cfg["scale"]))
                      for r in res)
            rep.check("p2_exact", dev <= tol["plancherel"], dev, tol["plancherel"])
        if cfg["max_factor"] is not None and min(vals) > 0:
            fac = max(vals) / min(vals)
            rep.check(f"stability/p={p}", fac <= cfg["max_factor"], fac, cfg["max_factor"])
    rep.table("sweep", rows)
    return rep


def run_report_merge(cfg):
    merged = merge_reports([load_json(p) for p in cfg["inputs"]])
    rep = Report("report-merge", cfg)
    for c in merged["checks"]:
        rep.check(c["name"], c["passed"], c.get("value"), c.get("tol"))
    rep.values.update(merged["values"])
    for item in merged["inputs"]:
        rep.check(f"input/{item['tag']}", item["passed"])
    return rep


RUNNERS = {
    "check-length": run_check_length, "cocycle": run_cocycle, "bmo": run_bmo,
    "multiplier": run_multiplier, "mihlin": run_mihlin, "lp": run_lp, "meyer": run_meyer,
    "khintchine": run_khintchine, "fft": run_fft, "report-merge": run_report_merge,
}


def run(command: str, cfg: dict) -> Report:
    return RUNNERS[command](cfg)
