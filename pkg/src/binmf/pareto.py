"""Weight sweeps and Pareto-dominance bookkeeping over (J_X, J_H)."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BinmfError, ConfigError, DomainError
from .matrix import as_array
from .objectives import ObjectiveVector
from .solver import SolutionRecord, SolveConfig, solve

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = tuple(i / 50 for i in range(51))


class SweepError(BinmfError):
    def __init__(self, alpha, cause):
        super().__init__(f"sub-problem alpha={alpha!r} failed: {cause}")
        self.alpha = alpha
        self.cause = cause


@dataclass(frozen=True)
class SweepConfig:
    base: SolveConfig
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    # None: every alpha reuses base.seed. Otherwise one seed per alpha.
    seeds: tuple[int, ...] | None = None

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas:
            raise ConfigError("alpha grid is empty")
        if any(not 0.0 <= a <= 1.0 for a in alphas):
            raise ConfigError(f"alphas must lie in [0, 1]: {alphas}")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ConfigError("alphas must be strictly increasing")
        if self.seeds is not None:
            seeds = tuple(int(s) for s in self.seeds)
            if len(seeds) != len(alphas):
                raise ConfigError(f"{len(seeds)} seeds given for {len(alphas)} alphas")
            object.__setattr__(self, "seeds", seeds)

    def configs(self) -> list[SolveConfig]:
        seeds = self.seeds or (self.base.seed,) * len(self.alphas)
        return [self.base.with_alpha(a, s) for a, s in zip(self.alphas, seeds)]

    def to_dict(self) -> dict:
        base = self.base.to_dict()
        del base["alpha"]
        return {"alphas": list(self.alphas),
                "seeds": None if self.seeds is None else list(self.seeds),
                "base": base}

    @classmethod
    def from_dict(cls, d: dict) -> SweepConfig:
        base = SolveConfig.from_dict({**d["base"], "alpha": d["alphas"][0]})
        seeds = d.get("seeds")
        return cls(base=base, alphas=tuple(d["alphas"]),
                   seeds=None if seeds is None else tuple(seeds))


@dataclass(frozen=True)
class ParetoFront:
    solutions: tuple[SolutionRecord, ...]
    nondominated: tuple[int, ...]
    dominated: tuple[int, ...]

    def nondominated_solutions(self) -> list[SolutionRecord]:
        return [self.solutions[i] for i in self.nondominated]

    def is_dominated(self, i: int) -> bool:
        return i in set(self.dominated)


def _point(u):
    if isinstance(u, ObjectiveVector):
        return u.j_input, u.j_feature
    if isinstance(u, SolutionRecord):
        return u.objective.j_input, u.objective.j_feature
    a, b = u
    return float(a), float(b)


def dominates(u, v, eps: float = 0.0) -> bool:
    """True if ``u`` is no worse than ``v`` in both objectives and better in one.

    ``eps > 0`` turns on epsilon-dominance: "no worse" allows a slack of
    ``eps`` and "better" requires a margin larger than ``eps``. Plotting only.
    """
    (u1, u2), (v1, v2) = _point(u), _point(v)
    return (u1 <= v1 + eps and u2 <= v2 + eps) and (u1 < v1 - eps or u2 < v2 - eps)


def nondominated_mask(points, eps: float = 0.0) -> np.ndarray:
    """Boolean mask of non-dominated rows of an (n, 2) array of objective pairs."""
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(P)
    if eps > 0:
        return np.array([not any(dominates(P[j], P[i], eps) for j in range(n) if j != i)
                         for i in range(n)], dtype=bool)
    mask = np.ones(n, dtype=bool)
    order = np.lexsort((P[:, 1], P[:, 0]))
    best_before = np.inf  # smallest J_H among points with strictly smaller J_X
    k = 0
    while k < n:
        x0 = P[order[k], 0]
        group = [order[k]]
        k += 1
        while k < n and P[order[k], 0] == x0:
            group.append(order[k])
            k += 1
        group_min = P[group[0], 1]  # lexsort puts the smallest J_H first
        for i in group:
            y = P[i, 1]
            if y >= best_before or y > group_min:
                mask[i] = False
        best_before = min(best_before, group_min)
    return mask


def filter_nondominated(solutions: Sequence, eps: float = 0.0) -> ParetoFront:
    """Split solutions into non-dominated and dominated index sets.

    Identical objective vectors never dominate each other, so ties are all kept.
    """
    solutions = tuple(solutions)
    if not solutions:
        raise DomainError("cannot filter an empty list of solutions")
    mask = nondominated_mask([_point(s) for s in solutions], eps)
    idx = np.arange(len(solutions))
    return ParetoFront(solutions, tuple(int(i) for i in idx[mask]),
                       tuple(int(i) for i in idx[~mask]))


def _solve_one(args):
    X, cfg = args
    try:
        return solve(X, cfg)
    except BinmfError as exc:
        raise SweepError(cfg.alpha, exc) from exc


def sweep(x, cfg: SweepConfig, jobs: int | None = 1) -> ParetoFront:
    """Solve every alpha of the grid and filter the resulting objective vectors.

    ``jobs > 1`` runs sub-problems in worker processes; results do not
    depend on the job count.
    """
    X = np.ascontiguousarray(as_array(x))
    configs = cfg.configs()
    if jobs is None:
        jobs = os.cpu_count() or 1
    tasks = [(X, c) for c in configs]
    if jobs <= 1 or len(tasks) == 1:
        records = [_solve_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            records = list(pool.map(_solve_one, tasks))
    front = filter_nondominated(records)
    log.info("sweep over %d weights: %d non-dominated", len(records), len(front.nondominated))
    return front


def front_export(front: ParetoFront) -> list[dict]:
    """One row per solution, sorted by alpha (stable for repeated alphas)."""
    dominated = set(front.dominated)
    rows = []
    for i, s in enumerate(front.solutions):
        ob = s.objective
        rows.append({
            "alpha": ob.alpha,
            "j_input": ob.j_input,
            "j_feature": ob.j_feature,
            "j_aggregated": ob.j_aggregated,
            "dominated": i in dominated,
            "iterations": s.iterations_run,
            "stop_reason": s.stop_reason,
        })
    rows.sort(key=lambda r: r["alpha"])
    return rows


def boundary_report(front: ParetoFront) -> dict:
    """Descriptive checks on the alpha = 0 and alpha = 1 solutions, when present.

    Nothing here is asserted: a dominated boundary solution is a legitimate
    outcome of an approximate sub-solver.
    """
    by_alpha = {s.alpha: i for i, s in enumerate(front.solutions)}
    out = {}
    dominated = set(front.dominated)
    for a in (0.0, 1.0):
        if a in by_alpha:
            out[f"alpha_{a:g}_dominated"] = by_alpha[a] in dominated
    if 0.0 in by_alpha and 1.0 in by_alpha:
        s0 = front.solutions[by_alpha[0.0]].objective
        s1 = front.solutions[by_alpha[1.0]].objective
        ok = s1.j_input <= s0.j_input
        out["linear_end_has_min_j_input"] = ok
        if not ok:
            log.warning("alpha=1 solution has larger J_X (%g) than alpha=0 (%g)",
                        s1.j_input, s0.j_input)
    return out


def conflicting_interval(front: ParetoFront):
    """Alpha range over which J_X falls while J_H rises between grid neighbours.

    Returns ``(lo, hi)`` spanning every such step, or None.
    """
    sols = sorted(front.solutions, key=lambda s: s.alpha)
    lo = hi = None
    for s, t in zip(sols, sols[1:]):
        if t.objective.j_input < s.objective.j_input and t.objective.j_feature > s.objective.j_feature:
            lo = s.alpha if lo is None else lo
            hi = t.alpha
    return None if lo is None else (lo, hi)
