"""Combinatorial tameness evidence for binary codings.

Word complexity and maximum independence sets: a set of window positions is
independent when every 0/1 pattern on it is exhibited by some factor of the
coding language.  Logarithmically bounded independence is the finite shadow
of tameness; linear growth certifies the opposite.  All quantities computed
from a finite horizon are certified lower bounds and reported as such.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .errors import BudgetExceeded

CACHE_FORMAT = "tamecert-factors v1"


def factor_masks(word, window: int) -> np.ndarray:
    """Sorted distinct factors of the given window length, as bitmasks."""
    return K.extract_factors(np.asarray(word, dtype=np.int64), window)


def mask_to_string(mask: int, window: int) -> str:
    return "".join("1" if (mask >> j) & 1 else "0" for j in range(window))


@dataclass(frozen=True)
class ComplexityProfile:
    """Distinct-factor counts p(1..L); horizon-limited, hence lower bounds."""

    counts: dict[int, int]
    horizon: int
    lower_bounds: bool = True

    def __getitem__(self, ell: int) -> int:
        return self.counts[ell]


def complexity(word, length: int, horizon: int | None = None) -> ComplexityProfile:
    """Factor-count profile p(1..length) from a coding word."""
    w = np.asarray(word, dtype=np.int64)
    horizon = w.shape[0] if horizon is None else horizon
    if horizon < 10 * length:
        raise ValueError(f"horizon {horizon} too short for length {length} (need >= 10x)")
    w = w[:horizon]
    counts = {ell: int(K.extract_factors(w, ell).size) for ell in range(1, length + 1)}
    return ComplexityProfile(counts, horizon)


@dataclass(frozen=True)
class IndependenceCertificate:
    """Positions plus, for every 0/1 pattern on them, a witnessing factor."""

    window: int
    positions: tuple[int, ...]
    witnesses: dict[str, str]  # pattern -> factor, both as bit strings
    horizon: int
    exhausted: bool  # search ran to completion (vs. budget cut)

    @property
    def size(self) -> int:
        return len(self.positions)

    def verify(self, word) -> bool:
        """Recheck every witness against the factor set of the word."""
        factors = set(map(int, factor_masks(word, self.window)))
        if len(self.witnesses) != 2 ** len(self.positions):
            return False
        seen = set()
        for pattern, factor in self.witnesses.items():
            if len(pattern) != len(self.positions) or len(factor) != self.window:
                return False
            mask = int(factor[::-1], 2) if factor else 0
            if mask not in factors:
                return False
            shown = "".join(factor[p] for p in self.positions)
            if shown != pattern:
                return False
            seen.add(pattern)
        return len(seen) == 2 ** len(self.positions)


def _covers(factors: np.ndarray, positions: tuple[int, ...]) -> bool:
    return K.distinct_projection_count(factors, np.asarray(positions, dtype=np.int64)) == (
        1 << len(positions)
    )


def _witnesses(factors: np.ndarray, positions: tuple[int, ...], window: int) -> dict[str, str]:
    proj = K.project_masks(factors, np.asarray(positions, dtype=np.int64))
    values, first = np.unique(proj, return_index=True)
    k = len(positions)
    out: dict[str, str] = {}
    for pattern, idx in zip(values.tolist(), first.tolist()):
        pat_str = "".join("1" if (pattern >> j) & 1 else "0" for j in range(k))
        out[pat_str] = mask_to_string(int(factors[idx]), window)
    return out


def max_independence(
    word, window: int, node_budget: int = 5_000_000
) -> IndependenceCertificate:
    """Maximum-size independent position set, by lexicographic branch and bound.

    The counting bound 2^|I| <= p(window) prunes globally; subtree pruning
    uses the remaining-position bound.  Include-first depth-first order makes
    the first maximum found the lexicographically smallest one.  On budget
    exhaustion raises BudgetExceeded with the best certificate attached.
    """
    if window > 24:
        raise ValueError("window above the search budget (max 24)")
    w = np.asarray(word, dtype=np.int64)
    if w.shape[0] < 10 * window:
        raise ValueError("horizon must be at least 10x the window")
    factors = factor_masks(w, window)
    cap = min(window, int(math.log2(len(factors))) if len(factors) else 0)
    best: tuple[int, ...] = ()
    nodes = 0
    out_of_budget = False

    def dfs(start: int, current: tuple[int, ...]) -> None:
        nonlocal best, nodes, out_of_budget
        for p in range(start, window):
            if out_of_budget or len(best) >= cap:
                return
            if len(current) + (window - p) <= len(best):
                return
            nodes += 1
            if nodes > node_budget:
                out_of_budget = True
                return
            cand = current + (p,)
            if _covers(factors, cand):
                if len(cand) > len(best):
                    best = cand
                dfs(p + 1, cand)

    if len(factors) >= 2 and cap >= 1:
        dfs(0, ())
    elif len(factors) == 1:
        best = ()
    cert = IndependenceCertificate(
        window=window,
        positions=best,
        witnesses=_witnesses(factors, best, window),
        horizon=int(w.shape[0]),
        exhausted=not out_of_budget,
    )
    if out_of_budget:
        raise BudgetExceeded(f"independence search for window {window} hit the node budget", best=cert)
    return cert


def exhaustive_max_independence(word, window: int) -> tuple[int, ...]:
    """Brute-force oracle: scan all position sets by descending size, lex order."""
    w = np.asarray(word, dtype=np.int64)
    factors = factor_masks(w, window)
    for size in range(window, 0, -1):
        for cand in itertools.combinations(range(window), size):
            if _covers(factors, cand):
                return cand
    return ()


@dataclass(frozen=True)
class GrowthReport:
    """Heuristic label over finite data; the raw table is the real content."""

    classification: str  # bounded_log | growing | inconclusive
    table: dict[int, dict[str, int]]  # L -> {complexity, independence}
    note: str

    def series(self):
        return [(L, row["complexity"], row["independence"]) for L, row in sorted(self.table.items())]


def growth_report(word, window_list) -> GrowthReport:
    """Classify independence growth over the tested windows.

    bounded_log: |I(L)| <= ceil(log2 p(L)) everywhere and p grows at most
    polynomially on the range.  growing: |I(L)| climbs at least half a
    position per window step.  Labels are heuristics over finite data.
    """
    window_list = sorted(window_list)
    if not window_list:
        raise ValueError("need at least one window length")
    table: dict[int, dict[str, int]] = {}
    for L in window_list:
        cert = max_independence(word, L)
        prof = complexity(word, L)
        table[L] = {"complexity": prof[L], "independence": cert.size}
    sizes = [table[L]["independence"] for L in window_list]
    log_ok = all(
        table[L]["independence"] <= math.ceil(math.log2(max(table[L]["complexity"], 2)))
        for L in window_list
    )
    poly_ok = all(table[L]["complexity"] <= (L + 1) ** 2 for L in window_list)
    if log_ok and poly_ok:
        cls = "bounded_log"
        note = "independence within the counting bound; complexity at most quadratic on range"
    elif (
        len(window_list) >= 2
        and all(b >= a for a, b in zip(sizes, sizes[1:]))
        and (sizes[-1] - sizes[0]) * 2 >= (window_list[-1] - window_list[0])
    ):
        cls = "growing"
        note = "independence grows at least half a position per window step on range"
    else:
        cls = "inconclusive"
        note = "finite data matches neither profile"
    return GrowthReport(cls, table, note + " (heuristic over finite horizons)")


# ---------------------------------------------------------------------------
# factor-set disk cache
# ---------------------------------------------------------------------------


def word_digest(word) -> str:
    w = np.asarray(word, dtype=np.uint8)
    return hashlib.sha256(w.tobytes()).hexdigest()[:16]


class FactorCache:
    """Factor sets cached as sorted one-word-per-line text files.

    Keyed by (spec digest, window, horizon); the header repeats the key so a
    stale file never validates.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, digest: str, window: int, horizon: int) -> Path:
        return self.root / "factors" / f"{digest}-L{window}-H{horizon}.txt"

    def load(self, digest: str, window: int, horizon: int) -> np.ndarray | None:
        path = self._path(digest, window, horizon)
        if not path.exists():
            return None
        lines = path.read_text().splitlines()
        header = f"# {CACHE_FORMAT} digest={digest} L={window} H={horizon}"
        if not lines or lines[0] != header:
            return None
        masks = [int(line[::-1], 2) for line in lines[1:] if line]
        return np.asarray(sorted(masks), dtype=np.int64)

    def store(self, digest: str, window: int, horizon: int, factors: np.ndarray) -> Path:
        path = self._path(digest, window, horizon)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = f"# {CACHE_FORMAT} digest={digest} L={window} H={horizon}"
        body = "\n".join([header] + [mask_to_string(int(m), window) for m in factors])
        path.write_text(body + "\n")
        return path

    def factors(self, word, window: int, digest: str | None = None) -> np.ndarray:
        w = np.asarray(word, dtype=np.int64)
        digest = digest or word_digest(w)
        horizon = int(w.shape[0])
        cached = self.load(digest, window, horizon)
        if cached is not None:
            return cached
        fresh = factor_masks(w, window)
        self.store(digest, window, horizon, fresh)
        return fresh
