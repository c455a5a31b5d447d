"""Finite-scale oscillation rank of sampled enveloping-semigroup elements.

The derivative keeps the points whose neighborhood carries an image pair at
least epsilon apart; the rank is the first stage at which iterating the
derivative empties the sample.  True neighborhood infima are out of reach at
finite scale, so each stage works at a resolution from a decreasing schedule
(stage one detects oscillation at a scale tied to epsilon, later stages drop
below the sample's separation gap, mirroring the isolation argument that
kills finite derived sets), and the whole iteration is rerun at halved and
quartered schedules: the reported rank is the value stable across the three
runs.  Continuous elements come out at 1, one-sided limit elements at 2;
deeper ranks need samples and schedules built for them and otherwise end in
the budget flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import NotStabilizedAcrossResolutions
from .envelope import ApproxElement, CircleMetric, CodingMetric
from .systems import RotationSystem, SplitCircleSystem


@dataclass
class RankInstance:
    """Arrays backing the rank computation for one sampled element.

    kind 'split': binary coding words plus base positions; the distance is
    the max of the weighted word sup-metric and the base arc distance.
    kind 'circle': positions only (arc metric), images embedded as scaled
    sin/cos columns (conservative within sqrt(2) for detection, exact enough
    for continuity bounds).  kind 'prefix': one-sided words under 2^-lcp.
    kind 'value': plain positions and scalar image values.
    """

    kind: str
    points: list
    words: np.ndarray | None  # (n, W) point words (split/prefix kinds)
    img_words: np.ndarray  # (n, W) image descriptor columns, weighted by `weights`
    weights: np.ndarray  # (W,)
    positions: np.ndarray | None = None  # (n,) base or value positions
    img_positions: np.ndarray | None = None  # (n,) image base positions (split kind)

    def separation_gap(self) -> float:
        """A positive scale below which distinct sample points separate."""
        gaps = []
        if self.positions is not None:
            s = np.sort(self.positions)
            d = np.diff(s)
            d = d[d > 0]
            if d.size:
                gaps.append(float(d.min()))
        if self.words is not None and self.weights.size:
            gaps.append(float(self.weights.min()))
        if not gaps:
            raise ValueError("degenerate instance: no separating scale")
        return min(gaps)


def split_instance(p: ApproxElement) -> RankInstance:
    metric: CodingMetric = p.sample.metric
    pts = p.sample.points
    h = metric.horizon
    words = np.array([metric.word(x) for x in pts], dtype=np.float64)
    img_words = np.array([metric.word(im) for im in p.images], dtype=np.float64)
    weights = 2.0 ** -np.abs(np.arange(-h, h + 1, dtype=np.float64))
    pos = np.array([x.base.as_float() for x in pts])
    img_pos = np.array([im.base.as_float() for im in p.images])
    return RankInstance("split", pts, words, img_words, weights, pos, img_pos)


def circle_instance(p: ApproxElement) -> RankInstance:
    metric: CircleMetric = p.sample.metric
    pts = p.sample.points
    pos = np.array([metric.position(x) for x in pts])
    img = np.array([metric.position(im) for im in p.images])
    cols = np.stack(
        [np.sin(2 * np.pi * img) / (2 * np.pi), np.cos(2 * np.pi * img) / (2 * np.pi)], axis=1
    )
    return RankInstance("circle", pts, None, cols, np.ones(2), pos, img)


def value_instance(points, values, images) -> RankInstance:
    """Scalar maps on an ordered sample (step maps, discrete families)."""
    img = np.asarray(images, dtype=np.float64).reshape(len(points), -1)
    return RankInstance(
        "value", list(points), None, img, np.ones(img.shape[1]),
        np.asarray(values, dtype=np.float64),
    )


def prefix_instance(points, point_words, image_words) -> RankInstance:
    """One-sided words (free-group boundary) under the 2^-lcp metric."""
    w = np.asarray(point_words, dtype=np.float64)
    iw = np.asarray(image_words, dtype=np.float64)
    weights = 2.0 ** -np.arange(w.shape[1], dtype=np.float64)
    return RankInstance("prefix", list(points), w, iw, weights)


def build_instance(p: ApproxElement) -> RankInstance:
    if isinstance(p.system, SplitCircleSystem) and isinstance(p.sample.metric, CodingMetric):
        return split_instance(p)
    if isinstance(p.system, RotationSystem) and isinstance(p.sample.metric, CircleMetric):
        return circle_instance(p)
    raise TypeError("no automatic rank arrays for this element; build an instance explicitly")


# ---------------------------------------------------------------------------
# one derivative stage
# ---------------------------------------------------------------------------


def _unwrap_circular(vals: np.ndarray) -> np.ndarray:
    """Re-anchor circle positions at the largest gap so a short arc becomes a
    plain interval (the minus point of a split pair has base 0 but lives at
    the top of its cell, so raw positions can straddle the 0/1 cut)."""
    if vals.size <= 1:
        return np.zeros_like(vals)
    order = np.argsort(vals)
    sp = vals[order]
    gaps = np.diff(sp)
    wrap = 1.0 - (sp[-1] - sp[0])
    if gaps.size and float(gaps.max()) > wrap:
        cut = sp[int(gaps.argmax()) + 1]
    else:
        cut = sp[0]
    return (vals - cut) % 1.0


def _stage(inst: RankInstance, active: np.ndarray, radius: float, eps: float):
    """Indices of the active points surviving one epsilon-derivative at the
    given resolution, plus their oscillation values and witness pairs."""
    survivors: list[int] = []
    osc_map: dict[int, float] = {}
    witness: dict[int, tuple[int, int]] = {}

    if inst.kind in ("split", "prefix"):
        if inst.kind == "split":
            # full-window cylinder key: the base distance supplies the radius,
            # and full word agreement stops beyond-horizon coordinates from
            # leaking fake oscillation into shifted images (valid for shifts
            # up to horizon - log2(1/eps))
            cols = np.arange(inst.words.shape[1])
        else:
            cols = np.nonzero(inst.weights > radius)[0]
        keys = inst.words[active][:, cols]
        if keys.shape[1] == 0:
            groups = [active]
        else:
            _, inv = np.unique(keys, axis=0, return_inverse=True)
            groups = [active[inv == g] for g in range(int(inv.max()) + 1)]
        for members in groups:
            if members.size < 2:
                continue
            if inst.kind == "split":
                # cells are short arcs but can straddle the 0/1 cut (the minus
                # point of a split pair); unwrap both base and image positions
                base = _unwrap_circular(inst.positions[members])
                if float(base.max()) > 1.0 - radius:
                    raise ValueError("cell spans the whole circle at this radius")
                order = np.argsort(base, kind="stable")
                members = members[order]
                base = base[order]
                ib = _unwrap_circular(inst.img_positions[members])
                if float(ib.max() - ib.min()) > 0.5:
                    raise ValueError("image arc exceeds a half circle; osc undefined here")
                img_cols = np.concatenate(
                    [inst.img_words[members] * inst.weights, ib[:, None]], axis=1
                )
                osc = K.window_oscillation(base, radius, img_cols, np.ones(img_cols.shape[1]))
                for j, idx in enumerate(members):
                    if osc[j] >= eps:
                        survivors.append(int(idx))
                        osc_map[int(idx)] = float(osc[j])
                        witness[int(idx)] = _window_witness(
                            members, base, img_cols, j, radius
                        )
            else:
                img = inst.img_words[members] * inst.weights
                spread = img.max(axis=0) - img.min(axis=0)
                osc = float(spread.max())
                if osc >= eps:
                    mcol = int(spread.argmax())
                    i1 = int(members[img[:, mcol].argmax()])
                    i2 = int(members[img[:, mcol].argmin()])
                    for idx in members:
                        survivors.append(int(idx))
                        osc_map[int(idx)] = osc
                        witness[int(idx)] = (i1, i2)
    elif inst.kind in ("circle", "value"):
        pos = inst.positions[active]
        if inst.kind == "circle":
            ext_pos = np.concatenate([pos - 1.0, pos, pos + 1.0])
            ext_img = np.tile(inst.img_words[active] * inst.weights, (3, 1))
            order = np.argsort(ext_pos, kind="stable")
            osc_all = K.window_oscillation(
                ext_pos[order], radius, ext_img[order], np.ones(ext_img.shape[1])
            )
            back = np.empty_like(order)
            back[order] = np.arange(order.size)
            osc = osc_all[back[len(pos) : 2 * len(pos)]]
            for j, idx in enumerate(active):
                if osc[j] >= eps:
                    survivors.append(int(idx))
                    osc_map[int(idx)] = float(osc[j])
                    witness[int(idx)] = (int(idx), int(idx))
        else:
            order = np.argsort(pos, kind="stable")
            members = active[order]
            base = pos[order]
            img_cols = inst.img_words[members] * inst.weights
            osc = K.window_oscillation(base, radius, img_cols, np.ones(img_cols.shape[1]))
            for j, idx in enumerate(members):
                if osc[j] >= eps:
                    survivors.append(int(idx))
                    osc_map[int(idx)] = float(osc[j])
                    witness[int(idx)] = _window_witness(members, base, img_cols, j, radius)
    else:
        raise ValueError(f"unknown instance kind {inst.kind!r}")
    return np.array(sorted(survivors), dtype=np.int64), osc_map, witness


def _window_witness(members, base, img_cols, j, radius):
    lo = int(np.searchsorted(base, base[j] - radius, side="left"))
    hi = int(np.searchsorted(base, base[j] + radius, side="right"))
    block = img_cols[lo:hi]
    spread = block.max(axis=0) - block.min(axis=0)
    mcol = int(spread.argmax())
    i1 = int(members[lo + block[:, mcol].argmax()])
    i2 = int(members[lo + block[:, mcol].argmin()])
    return (i1, i2)


# ---------------------------------------------------------------------------
# the rank iteration
# ---------------------------------------------------------------------------


@dataclass
class RankTrace:
    epsilon: float
    schedule: tuple[float, ...]
    stages: list[np.ndarray]  # A^0 superset A^1 superset ...
    oscillations: list[dict[int, float]]
    witnesses: list[dict[int, tuple[int, int]]]
    beta: int | None  # least stage index with empty set; None = budget flag
    emptied: bool
    stabilized: bool = True

    def stage_sizes(self) -> list[int]:
        return [len(s) for s in self.stages]

    def verify_witnesses(self, inst: RankInstance) -> bool:
        """Recheck each survivor's pair: within the stage radius and eps apart."""
        for depth, (stage_set, wit) in enumerate(zip(self.stages[1:], self.witnesses)):
            r = self.schedule[min(depth, len(self.schedule) - 1)]
            prev = set(int(i) for i in self.stages[depth])
            for idx in stage_set:
                i1, i2 = wit[int(idx)]
                if i1 not in prev or i2 not in prev:
                    return False
                if _point_dist(inst, int(idx), i1) > r + 1e-12:
                    return False
                if _point_dist(inst, int(idx), i2) > r + 1e-12:
                    return False
                if _image_dist(inst, i1, i2) < self.epsilon - 1e-12:
                    return False
        return True


def _point_dist(inst: RankInstance, i: int, j: int) -> float:
    d = 0.0
    if inst.words is not None:
        diff = inst.words[i] != inst.words[j]
        if diff.any():
            # split kind refines balls to full-window cylinders: any word
            # difference separates at unit scale
            d = 1.0 if inst.kind == "split" else float(inst.weights[diff].max())
    if inst.positions is not None:
        b = abs(float(inst.positions[i] - inst.positions[j]))
        if inst.kind in ("split", "circle"):
            b = min(b, 1.0 - b)
        d = max(d, b)
    return d


def _image_dist(inst: RankInstance, i: int, j: int) -> float:
    cols = np.abs(inst.img_words[i] - inst.img_words[j]) * inst.weights
    d = float(cols.max()) if cols.size else 0.0
    if inst.img_positions is not None:
        b = abs(float(inst.img_positions[i] - inst.img_positions[j]))
        d = max(d, min(b, 1.0 - b))
    return d


def default_schedule(inst: RankInstance, epsilon: float) -> tuple[float, ...]:
    """Stage one at a detection scale tied to epsilon, later stages below the
    sample separation gap (the finite image of shrinking neighborhoods)."""
    g = inst.separation_gap()
    return (epsilon / 8.0, g / 2.0, g / 8.0)


def beta_rank(
    p: ApproxElement | RankInstance,
    epsilon: float,
    r_schedule: Sequence[float] | None = None,
    stage_budget: int = 8,
    rerun_scales: Sequence[float] = (1.0, 0.5, 0.25),
    raise_on_unstable: bool = True,
) -> RankTrace:
    """Oscillation rank of the element on its sample.

    Runs the derivative iteration once per rerun scale (the schedule scaled
    down); the result is stabilized when all runs agree on the terminal
    index.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    inst = p if isinstance(p, RankInstance) else build_instance(p)
    base_schedule = tuple(r_schedule) if r_schedule is not None else default_schedule(inst, epsilon)
    if any(b >= a for a, b in zip(base_schedule, base_schedule[1:])):
        raise ValueError("resolution schedule must be strictly decreasing")

    traces = []
    for scale in rerun_scales:
        schedule = tuple(r * scale for r in base_schedule)
        active = np.arange(len(inst.points), dtype=np.int64)
        stages = [active]
        oscs, wits = [], []
        beta = None
        for depth in range(stage_budget):
            r = schedule[min(depth, len(schedule) - 1)]
            active, osc_map, wit = _stage(inst, active, r, epsilon)
            stages.append(active)
            oscs.append(osc_map)
            wits.append(wit)
            if active.size == 0:
                beta = depth + 1
                break
        traces.append(
            RankTrace(epsilon, schedule, stages, oscs, wits, beta, beta is not None)
        )
    estimates = [t.beta for t in traces]
    stable = len(set(estimates)) == 1
    main = traces[0]
    main.stabilized = stable
    if not stable and raise_on_unstable:
        raise NotStabilizedAcrossResolutions(
            f"rank estimates {estimates} across rerun scales {tuple(rerun_scales)}",
            estimates=estimates,
        )
    return main


def oscillation(p: ApproxElement, x, pool: Sequence, radius: float) -> float:
    """Direct finite-scale oscillation of p at x over the pool (brute force)."""
    metric = p.sample.metric
    ball = [y for y in pool if metric(x, y) <= radius]
    best = 0.0
    for i, y in enumerate(ball):
        for z in ball[i + 1 :]:
            d = metric(p.image_of(y), p.image_of(z))
            if d > best:
                best = d
    return best


def naive_beta_rank(
    inst: RankInstance, epsilon: float, schedule: Sequence[float], stage_budget: int = 8
):
    """Brute-force oracle: direct pairwise recomputation of every stage."""
    n = len(inst.points)
    active = list(range(n))
    stages = [list(active)]
    beta = None
    for depth in range(stage_budget):
        r = schedule[min(depth, len(schedule) - 1)]
        nxt = []
        for x in active:
            ball = [y for y in active if _point_dist(inst, x, y) <= r]
            osc = 0.0
            for a in range(len(ball)):
                for b in range(a + 1, len(ball)):
                    osc = max(osc, _image_dist(inst, ball[a], ball[b]))
            if osc >= epsilon:
                nxt.append(x)
        active = nxt
        stages.append(list(active))
        if not active:
            beta = depth + 1
            break
    return beta, stages


@dataclass
class SystemRank:
    beta: int | None
    witness: str
    traces: dict[str, RankTrace]


def system_rank(
    elements: dict[str, ApproxElement | RankInstance],
    epsilon: float,
    r_schedule: Sequence[float] | None = None,
) -> SystemRank:
    """Supremum of the element ranks over a named family."""
    traces = {}
    best_name, best = None, 0
    for name, el in elements.items():
        t = beta_rank(el, epsilon, r_schedule=r_schedule)
        traces[name] = t
        key = math.inf if t.beta is None else t.beta
        if key > best or best_name is None:
            best, best_name = key, name
    beta = None if best is math.inf else int(best)
    return SystemRank(beta, best_name, traces)
