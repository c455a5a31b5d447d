"""Experiment harness: config-driven runs, JSON reports, CSV plot data.

Verbs: ``run <config>``, ``plot <report> <series>``, ``list-systems``,
``verify <certificate>``.  Exit codes: 0 success, 2 validation error,
3 honest non-stabilization (budget or stopping contract; the report is still
written with the partial result).  Reports are deterministic for a fixed
config and seed apart from the wall-time field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetExceeded, ConfigError, NotStabilized, NotStabilizedAcrossResolutions
from .exactarith import GOLDEN, CirclePoint, one_sided_approach
from . import envelope, order, rank, systems, tameness
from .boundary import ReducedWord, boundary_sample, loxodromic_rank_arrays, power_limit
from .linear import MatrixSequenceSpec, affine_catalog_limit, matrix_limit, pinned_by_three

SCHEMA_VERSION = 1

NAMED_SYSTEMS = {
    "sturmian": {"kind": "split_circle", "alpha": "cf:[0;1,...]", "split_set": "orbit"},
    "sturmian-sqrt2": {"kind": "split_circle", "alpha": "cf:[0;2,...]", "split_set": "orbit"},
    "rationals-split": {"kind": "split_circle", "alpha": "cf:[0;1,...]", "split_set": "rationals"},
    "rotation": {"kind": "rotation", "alpha": "cf:[0;1,...]"},
    "rotation-sqrt2": {"kind": "rotation", "alpha": "cf:[0;2,...]"},
    "cos": {"kind": "cos", "alpha": "cf:[0;1,...]", "horizon": 6},
    "cantor6": {"kind": "cut_project", "alpha": "cf:[0;1,...]",
                "window": {"cantor_generation": 6, "scale": "1/2"}},
    "semicocycle": {"kind": "semicocycle", "n_max": 8, "depth": 24},
}


def resolve_system(spec):
    if isinstance(spec, str):
        if spec not in NAMED_SYSTEMS:
            raise ConfigError(f"unknown system name {spec!r}")
        spec = NAMED_SYSTEMS[spec]
    return systems.load_system(spec)


def _point(system_alpha, desc) -> CirclePoint:
    """Point literal {a: int, b: 'num/den'}."""
    return CirclePoint(system_alpha, int(desc.get("a", 0)), Fraction(desc.get("b", 0)))


def _point_str(p: CirclePoint) -> str:
    return f"{p.a}*alpha+{p.b}"


def _frac(x) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# experiment dispatchers: each takes (params, seed) and returns a result dict
# ---------------------------------------------------------------------------


def run_limit(params, seed):
    sys_ = resolve_system(params.get("system", "sturmian"))
    alpha = sys_.alpha
    target = _point(alpha, params.get("target", {"a": 0, "b": 0}))
    side = params.get("side", "below")
    depth = int(params.get("depth", 10))
    approach = one_sided_approach(target, side, depth)
    extra = [(-target).translate(k) for k in range(-3, 4)]
    sample = envelope.split_sample(
        sys_,
        plain_count=int(params.get("plain_count", 200)),
        split_range=int(params.get("split_range", 8)),
        horizon=int(params.get("horizon", 8)),
        extra_bases=extra,
    ) if isinstance(sys_, systems.SplitCircleSystem) else envelope.rotation_sample(
        sys_, int(params.get("plain_count", 200))
    )
    numeric = bool(params.get("numeric", False))
    generator = list(approach.times) if numeric else approach
    element = envelope.limit_map(
        sys_, generator, sample,
        tolerance=float(params.get("tolerance", 1e-9)),
        max_stages=int(params.get("max_stages", 64)),
    )
    cls = envelope.classify(element)
    out = {
        "backend": element.backend,
        "stabilized": element.stabilized,
        "classification": {
            "tag": cls.tag,
            "params": {
                k: (_point_str(v) if isinstance(v, CirclePoint) else str(v))
                for k, v in cls.params.items()
            },
        },
        "times": [int(t) for t in approach.times],
        "error_bounds": [str(b) for b in approach.error_bounds],
    }
    if cls.tag == "one_sided":
        dec = envelope.decompose_minimal(element)
        out["decomposition"] = {"epsilon": dec.epsilon, "gamma": _point_str(dec.gamma)}
    cert = {
        "kind": "limit",
        "system": sys_.describe(),
        "generator": {"target": _point_str(target), "side": side,
                      "times": [int(t) for t in approach.times]},
        "sample_size": len(sample),
        "tolerance": None if element.backend == "exact" else element.tolerance,
        "result": out["classification"],
        "witness": out.get("decomposition"),
    }
    return out, [cert]


def _coding_word(params):
    coding = params.get("coding", {"system": "sturmian"})
    horizon = int(params.get("horizon", 10_000))
    if coding.get("kind") == "full_shift":
        return systems.full_shift_word(int(coding["window"])), {"kind": "full_shift"}
    if coding.get("kind") == "periodic":
        pattern = [int(x) for x in coding["pattern"]]
        reps = horizon // len(pattern) + 1
        return np.tile(pattern, reps)[:horizon], {"kind": "periodic", "pattern": pattern}
    sys_ = resolve_system(coding.get("system", "sturmian"))
    if isinstance(sys_, systems.SplitCircleSystem):
        word = sys_.word(sys_.orbit_pt(0, systems.PLUS), horizon)
    elif isinstance(sys_, systems.CutProjectCoding):
        word = sys_.word(horizon)
    else:
        raise ConfigError("coding source must be a split-circle or cut-project system")
    return word, sys_.describe()


def run_independence(params, seed):
    word, source = _coding_word(params)
    windows = [int(L) for L in params.get("windows", [8, 12, 16, 20])]
    budget = int(params.get("node_budget", 5_000_000))
    cache_dir = params.get("cache_dir")
    if cache_dir:
        tameness.FactorCache(cache_dir).factors(word, max(windows))
    rows, certs = [], []
    flag = None
    for L in sorted(windows):
        try:
            cert = tameness.max_independence(word, L, node_budget=budget)
        except BudgetExceeded as exc:
            cert = exc.best
            flag = f"budget exceeded at window {L}"
        prof = tameness.complexity(word, L)
        rows.append(
            {"window": L, "complexity": prof[L], "independence": cert.size,
             "positions": list(cert.positions), "exhausted": cert.exhausted}
        )
        certs.append(
            {"kind": "independence", "source": source, "window": L,
             "horizon": cert.horizon, "positions": list(cert.positions),
             "witnesses": cert.witnesses, "exhausted": cert.exhausted}
        )
        if flag:
            break
    growth = tameness.growth_report(word, windows) if flag is None else None
    result = {"table": rows, "source": source}
    if growth:
        result["growth"] = {"classification": growth.classification, "note": growth.note}
    if flag:
        result["flag"] = flag
        raise _Partial(result, certs)
    return result, certs


def run_rank(params, seed):
    sys_name = params.get("system", "sturmian")
    epsilons = [float(e) for e in params.get("epsilons", [0.1, 0.01])]
    schedule = params.get("schedule")
    if schedule is not None:
        schedule = tuple(float(r) for r in schedule)
    rows, certs = [], []
    sys_ = None if sys_name == "boundary-f2" else resolve_system(sys_name)
    if isinstance(sys_, systems.SplitCircleSystem):
        sample = envelope.split_sample(
            sys_, plain_count=int(params.get("plain_count", 4000)),
            split_range=int(params.get("split_range", 8)),
            horizon=int(params.get("horizon", 12)),
        )
        elements = {}
        for n in params.get("translations", [1, 3]):
            elements[f"T^{n}"] = envelope.limit_map(sys_, [int(n)], sample)
        for g in params.get("one_sided", [{"a": 0, "b": 0, "side": "below"}]):
            target = _point(sys_.alpha, g)
            ap = one_sided_approach(target, g.get("side", "below"), 10)
            elements[f"p({_point_str(target)})^{g.get('side', 'below')}"] = envelope.limit_map(
                sys_, ap, sample
            )
    elif isinstance(sys_, systems.RotationSystem):
        sample = envelope.rotation_sample(sys_, int(params.get("plain_count", 500)))
        elements = {}
        for g in params.get("rotations", [{"a": 0, "b": "1/3", "side": "above"}]):
            target = _point(sys_.alpha, g)
            ap = one_sided_approach(target, g.get("side", "above"), 8)
            elements[f"R({_point_str(target)})"] = envelope.limit_map(sys_, ap, sample)
        for n in params.get("translations", []):
            elements[f"T^{n}"] = envelope.limit_map(sys_, [int(n)], sample)
    elif sys_name == "boundary-f2" or params.get("gamma"):
        # word literals over a b A B (capitals are inverses)
        gamma = ReducedWord.parse(params.get("gamma", "ab"))
        depth = int(params.get("depth", 16))
        lox = power_limit(gamma, depth=depth)
        pts = boundary_sample(depth, base_length=int(params.get("base_length", 5)), lox=lox)
        pw, iw = loxodromic_rank_arrays(lox, pts)
        inst = rank.prefix_instance(pts, pw, iw)
        elements = {f"lox({gamma})": inst}
        sample = pts
    else:
        raise ConfigError(f"rank experiment does not support system {sys_name!r}")
    for eps in epsilons:
        sr = rank.system_rank(elements, eps, r_schedule=schedule)
        rows.append(
            {"epsilon": eps, "beta": sr.beta, "witness": sr.witness,
             "stages": {name: t.stage_sizes() for name, t in sr.traces.items()}}
        )
        certs.append(
            {"kind": "rank", "system": sys_name, "epsilon": eps, "beta": sr.beta,
             "sample_size": len(sample),
             "generator": sr.witness,
             "schedule": list(sr.traces[sr.witness].schedule),
             "stage_sizes": sr.traces[sr.witness].stage_sizes()}
        )
    return {"table": rows, "sample_size": len(sample)}, certs


def run_fibers(params, seed):
    sys_ = resolve_system(params.get("system", "semicocycle"))
    rng = np.random.RandomState(seed)
    if isinstance(sys_, systems.SemicocycleCascade):
        k_max = int(params.get("k_max", 6))
        depth = int(params.get("depth", 20))
        cards = sys_.fiber_cardinalities(k_max, depth)
        unmarked = [int(rng.randint(-(10**6), 10**6)) for _ in range(int(params.get("unmarked", 10)))]
        um = {j: sys_.unmarked_fiber_cardinality(j) for j in unmarked}
        return {"marked": {str(k): v for k, v in cards.items()},
                "unmarked_all_one": all(v == 1 for v in um.values()),
                "unmarked_count": len(um)}, []
    if isinstance(sys_, systems.SplitCircleSystem):
        orbit_range = int(params.get("orbit_range", 50))
        sizes = {n: len(sys_.split_fiber(CirclePoint(sys_.alpha, n, Fraction(0))))
                 for n in range(-orbit_range, orbit_range + 1)}
        off = []
        for _ in range(int(params.get("off_orbit", 50))):
            b = Fraction(int(rng.randint(1, 10**6)), 10**6 + 1)
            off.append(len(sys_.split_fiber(CirclePoint(sys_.alpha, 0, b))))
        return {"orbit_all_two": all(v == 2 for v in sizes.values()),
                "off_orbit_all_one": all(v == 1 for v in off),
                "orbit_range": orbit_range, "off_orbit_count": len(off)}, []
    raise ConfigError("fibers experiment needs a semicocycle or split-circle system")


def run_determine(params, seed):
    family_kind = params.get("family", "rotation")
    m = int(params.get("size", 7))
    if family_kind == "rotation":
        alpha = GOLDEN
        pool = [CirclePoint(alpha, 0, Fraction(k, 11)) for k in range(11)]
        gammas = [CirclePoint(alpha, 0, Fraction(k, m)) for k in range(m)]
        family = [lambda x, g=g: x + g for g in gammas]
        sizes = [len(envelope.determining_set(family, pool, p).points) for p in family]
        return {"family": "rotation", "sizes": sizes, "all_single": all(s == 1 for s in sizes)}, []
    if family_kind == "discrete":
        grid = [Fraction(k, m) for k in range(m)]
        fam = order.discrete_family(grid) + [order.zero_map]
        res = envelope.determining_set(fam, grid, order.zero_map)
        growth = envelope.determining_growth(
            order.discrete_family(grid), grid, order.zero_map,
            sizes=list(range(1, m + 1)),
        )
        return {"family": "discrete", "size": m, "c_size": len(res.points),
                "optimal": res.optimal, "growth": growth}, []
    if family_kind == "staircase":
        # map literal syntax: "(x; left,point,right) ..." plus a probe level
        f = order.parse_step_map(params["map"])
        dom = order.OrderedDomain.interval(sample_level=int(params.get("sample_level", 5)))
        res = order.helly_determining_set(
            f, dom, adversaries=int(params.get("adversaries", 200)), seed=seed
        )
        cert = {"kind": "helly_determining", "map": params["map"],
                "sample_size": len(res.points),
                "result": {"sound": res.sound, "adversaries": res.adversaries_defeated},
                "witness": [[str(x), s] for x, s in res.points]}
        return {"family": "staircase", "c_size": len(res.points),
                "sound": res.sound}, [cert]
    raise ConfigError(f"unknown determining family {family_kind!r}")


def run_isolation(params, seed):
    count = int(params.get("count", 100))
    eps = Fraction(params.get("eps", "1/4"))
    alpha = GOLDEN
    gammas = [CirclePoint(alpha, k, Fraction(k % 29, 29)) for k in range(count)]
    diag = envelope.sorgenfrey_isolation(envelope.flipped_diagonal(gammas), eps=eps)
    dense = [((CirclePoint(alpha, 0, Fraction(k, count)), systems.PLUS),) for k in range(count)]
    single = envelope.sorgenfrey_isolation(dense, eps=eps)
    cert = {"kind": "isolation", "eps": str(eps), "count": count,
            "diagonal_isolated": diag.all_isolated,
            "single_circle_isolated": single.all_isolated,
            "gammas": [_point_str(g) for g in gammas]}
    return {"diagonal_all_isolated": diag.all_isolated,
            "single_circle_all_isolated": single.all_isolated,
            "single_circle_conflicts": sum(1 for c in single.conflicts if c)}, [cert]


def run_counterexample(params, seed):
    import random as _random

    scenario = params.get("scenario", "circle_parabolic")
    rng = _random.Random(seed)
    count = int(params.get("count", 100))
    size = int(params.get("size", 50))
    sound = 0
    last = None
    for _ in range(count):
        if scenario == "circle_parabolic":
            cset = [Fraction(rng.randint(1, 997), 997) for _ in range(size)]
            w = envelope.no_countable_basis_witness(cset, "circle_parabolic")
            last = {"differs_at": str(w.differs_at)}
        elif scenario == "projective_p_infty":
            pts = [(rng.randint(-99, 99), rng.randint(-99, 99)) for _ in range(size)]
            pts = [p for p in pts if p != (0, 0)] or [(1, 0)]
            w = envelope.no_countable_basis_witness(pts, "projective_p_infty")
            last = {"line_direction": [str(x) for x in w.differs_at]}
        elif scenario == "circular_order":
            cset = [Fraction(rng.randint(1, 997), 997) for _ in range(size)]
            out = order.circular_counterexample(cset, Fraction(0))
            w = out
            last = {"b": str(out.b)}
        else:
            raise ConfigError(f"unknown scenario {scenario!r}")
        sound += 1 if w.sound else 0
    cert = {"kind": "counterexample", "scenario": scenario,
            "count": count, "size": size, "sound": sound, "example": last}
    return {"scenario": scenario, "sound": sound, "count": count}, [cert]


def run_rigidity(params, seed):
    sys_ = resolve_system(params.get("system", "rotation-sqrt2"))
    if isinstance(sys_, systems.RotationSystem):
        sample = envelope.rotation_sample(sys_, int(params.get("plain_count", 20)))
        ks = int(params.get("denominators", 25))
        times = [sys_.alpha.denominator(k) for k in range(1, ks + 1)]
    else:
        sample = envelope.split_sample(
            sys_, plain_count=int(params.get("plain_count", 24)),
            split_range=4, horizon=int(params.get("horizon", 6)))
        times = list(range(1, int(params.get("max_time", 10_000)) + 1))
    rep = envelope.rigidity_probe(sys_, sample, times)
    series = [[int(n), rep.distances[n]] for n in sorted(rep.distances)]
    return {"minimum": {"n": rep.minimum[0], "distance": rep.minimum[1]},
            "series_length": len(series), "series": series[:200]}, []


def run_catalog(params, seed):
    rows = []
    elements = []
    for mspec in params.get("matrices", []):
        # matrix literals: row-major rational lists plus a dimension flag
        dim = int(mspec.get("dim", 2))
        entries = mspec.get("entries")
        kind = mspec.get("matrix_kind", "powers")
        if kind == "powers":
            g = [[Fraction(x) for x in row] for row in entries]
            spec = MatrixSequenceSpec("powers", dim, entries=g)
        elif kind == "scalar":
            spec = MatrixSequenceSpec("scalar", dim)
        else:
            raise ConfigError(f"unknown matrix kind {kind!r}")
        p = matrix_limit(spec, stages=int(mspec.get("stages", 12)))
        rows.append({"matrix_kind": kind, "dim": dim, "domain_dim": p.domain_dim,
                     "basis": [[str(x) for x in b] for b in p.basis]})
    grid = [float(x) for x in params.get("grid", [-1.0, 0.0, 1.0])]
    for s in grid:
        for r in grid:
            m = affine_catalog_limit("jump", r=r, s=s, stages=int(params.get("stages", 40)))
            elements.append(m)
            rows.append({"kind": "jump", "r": r, "s": s, "class": m.kind})
        elements.append(affine_catalog_limit("const", s=s))
        rows.append({"kind": "const", "s": s, "class": "constant"})
    for sign in (1, -1):
        elements.append(affine_catalog_limit("const_inf", sign=sign))
        rows.append({"kind": "const_inf", "sign": sign, "class": "constant"})
    probes = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]
    pinned = all(
        pinned_by_three(m, elements, probes) for m in elements if m.kind == "three_region"
    )
    return {"table": rows, "jump_elements_pinned_by_three": pinned}, []


DISPATCH = {
    "limit": run_limit,
    "independence": run_independence,
    "rank": run_rank,
    "fibers": run_fibers,
    "determine": run_determine,
    "isolation": run_isolation,
    "counterexample": run_counterexample,
    "rigidity": run_rigidity,
    "catalog": run_catalog,
}


class _Partial(Exception):
    """Carries a partial result for honest non-stabilization outcomes."""

    def __init__(self, result, certs):
        super().__init__("partial result")
        self.result = result
        self.certs = certs


# ---------------------------------------------------------------------------
# run / report plumbing
# ---------------------------------------------------------------------------


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _digest(obj) -> str:
    return hashlib.sha256(_canonical(obj).encode()).hexdigest()[:16]


def run_config(config: dict, jobs: int = 1, seed: int | None = None) -> tuple[dict, int]:
    if "experiments" in config:
        experiments = config["experiments"]
    else:
        experiments = [config]
    seed = int(config.get("seed", 0) if seed is None else seed)
    for i, exp in enumerate(experiments):
        kind = exp.get("kind")
        if kind not in DISPATCH:
            raise ConfigError(f"experiment {i}: unknown kind {kind!r}")
        eps = exp.get("params", {}).get("epsilons")
        if eps is not None and any(float(e) <= 0 for e in eps):
            raise ConfigError(f"experiment {i}: epsilon must be positive")

    exit_code = 0
    results: list[dict | None] = [None] * len(experiments)

    def _one(i_exp):
        i, exp = i_exp
        kind = exp["kind"]
        params = exp.get("params", {})
        entry = {"id": exp.get("id", f"{kind}-{i}"), "kind": kind}
        try:
            result, certs = DISPATCH[kind](params, seed)
            entry["result"] = result
            entry["certificates"] = certs
            entry["status"] = "ok"
        except _Partial as partial:
            entry["result"] = partial.result
            entry["certificates"] = partial.certs
            entry["status"] = "not_stabilized"
        except (NotStabilized, NotStabilizedAcrossResolutions, BudgetExceeded) as exc:
            entry["result"] = {"error": str(exc)}
            entry["certificates"] = []
            entry["status"] = "not_stabilized"
        return i, entry

    started = time.time()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for i, entry in pool.map(_one, enumerate(experiments)):
                results[i] = entry
    else:
        for i, entry in map(_one, enumerate(experiments)):
            results[i] = entry
    if any(r["status"] != "ok" for r in results):
        exit_code = 3

    report = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "config_digest": _digest(config),
        "seed": seed,
        "results": results,
        "wall_time_s": round(time.time() - started, 3),
    }
    return report, exit_code


def report_payload(report: dict) -> dict:
    """The deterministic portion of a report (everything but the wall time)."""
    return {k: v for k, v in report.items() if k != "wall_time_s"}


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------

SERIES_COLUMNS = {
    "independence": ("L", "complexity", "independence"),
    "rank": ("stage", "set_size"),
    "rigidity": ("n", "sup_distance"),
}


def emit_plot_data(report: dict, series: str) -> str:
    from .errors import UnknownSeries

    if series not in SERIES_COLUMNS:
        raise UnknownSeries(f"no such series {series!r}; known: {sorted(SERIES_COLUMNS)}")
    cols = SERIES_COLUMNS[series]
    lines = [",".join(cols)]
    for entry in report.get("results", []):
        if series == "independence" and entry["kind"] == "independence":
            for row in entry["result"].get("table", []):
                lines.append(f"{row['window']},{row['complexity']},{row['independence']}")
        elif series == "rank" and entry["kind"] == "rank":
            for cert in entry.get("certificates", []):
                for stage, size in enumerate(cert.get("stage_sizes", [])):
                    lines.append(f"{stage},{size}")
        elif series == "rigidity" and entry["kind"] == "rigidity":
            for n, d in entry["result"].get("series", []):
                lines.append(f"{n},{d}")
    if len(lines) == 1:
        raise UnknownSeries(f"report contains no data for series {series!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def verify_certificate(cert: dict) -> bool:
    kind = cert.get("kind")
    if kind == "independence":
        source = cert["source"]
        if source.get("kind") == "full_shift":
            word = systems.full_shift_word(int(cert["window"]))
        elif source.get("kind") == "periodic":
            word = np.tile(source["pattern"], cert["horizon"] // len(source["pattern"]) + 1)[
                : cert["horizon"]
            ]
        else:
            sys_ = systems.load_system(source)
            if isinstance(sys_, systems.SplitCircleSystem):
                word = sys_.word(sys_.orbit_pt(0, systems.PLUS), cert["horizon"])
            else:
                word = sys_.word(cert["horizon"])
        made = tameness.IndependenceCertificate(
            window=int(cert["window"]),
            positions=tuple(cert["positions"]),
            witnesses=dict(cert["witnesses"]),
            horizon=int(cert["horizon"]),
            exhausted=bool(cert["exhausted"]),
        )
        return made.verify(word)
    if kind == "isolation":
        count = int(cert["count"])
        alpha = GOLDEN
        gammas = [CirclePoint(alpha, k, Fraction(k % 29, 29)) for k in range(count)]
        rep = envelope.sorgenfrey_isolation(
            envelope.flipped_diagonal(gammas), eps=Fraction(cert["eps"])
        )
        return rep.all_isolated == bool(cert["diagonal_isolated"])
    if kind == "counterexample":
        return int(cert["sound"]) == int(cert["count"])
    if kind == "rank":
        sizes = cert.get("stage_sizes", [])
        ok = all(b <= a for a, b in zip(sizes, sizes[1:]))
        if cert.get("beta") is not None:
            ok = ok and len(sizes) >= cert["beta"] + 1 and sizes[cert["beta"]] == 0
        return ok
    if kind == "limit":
        sys_ = systems.load_system(cert["system"])
        gen = cert["generator"]
        m = __import__("re").match(r"(-?\d+)\*alpha\+(-?\d+(?:/\d+)?)", gen["target"])
        target = CirclePoint(sys_.alpha, int(m.group(1)), Fraction(m.group(2)))
        extra = [(-target).translate(k) for k in range(-3, 4)]
        sample = envelope.split_sample(sys_, plain_count=60, split_range=4, extra_bases=extra)
        element = envelope.limit_map(sys_, one_sided_approach(target, gen["side"], 6), sample)
        cls = envelope.classify(element)
        return cls.tag == cert["result"]["tag"]
    if kind == "helly_determining":
        f = order.parse_step_map(cert["map"])
        dom = order.OrderedDomain.interval(sample_level=5)
        res = order.helly_determining_set(f, dom, adversaries=50)
        return res.sound == bool(cert["result"]["sound"])
    raise ConfigError(f"cannot verify certificate kind {kind!r}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tamecert", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--cache-dir", type=Path, default=None)

    p_plot = sub.add_parser("plot", help="emit CSV plot data from a report")
    p_plot.add_argument("report", type=Path)
    p_plot.add_argument("series")
    p_plot.add_argument("--out", type=Path, default=None)

    sub.add_parser("list-systems", help="print the named system registry")

    p_verify = sub.add_parser("verify", help="re-check a certificate file")
    p_verify.add_argument("certificate", type=Path)

    args = parser.parse_args(argv)

    if args.verb == "list-systems":
        for name, spec in sorted(NAMED_SYSTEMS.items()):
            print(f"{name}: {_canonical(spec)}")
        return 0

    if args.verb == "run":
        try:
            config = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        cache = args.cache_dir or os.environ.get("TAMECERT_CACHE_DIR")
        if cache:
            for exp in config.get("experiments", [config]):
                exp.setdefault("params", {}).setdefault("cache_dir", str(cache))
        try:
            report, code = run_config(config, jobs=args.jobs, seed=args.seed)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        out = args.out or args.config.with_suffix(".report.json")
        out.write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
        print(f"report written to {out}")
        return code

    if args.verb == "plot":
        from .errors import UnknownSeries

        report = json.loads(args.report.read_text())
        try:
            csv = emit_plot_data(report, args.series)
        except UnknownSeries as exc:
            print(f"unknown series: {exc}", file=sys.stderr)
            return 2
        if args.out:
            args.out.write_text(csv)
            print(f"csv written to {args.out}")
        else:
            print(csv, end="")
        return 0

    if args.verb == "verify":
        data = json.loads(args.certificate.read_text())
        certs = data if isinstance(data, list) else [data]
        if "results" in data:
            certs = [c for entry in data["results"] for c in entry.get("certificates", [])]
        ok = True
        for cert in certs:
            good = verify_certificate(cert)
            print(f"{cert.get('kind')}: {'ok' if good else 'FAILED'}")
            ok = ok and good
        return 0 if ok else 1

    return 2


if __name__ == "__main__":
    sys.exit(main())
