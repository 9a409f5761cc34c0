"""Exact assignment of topics to insertion points.

Maximizes sum over placed topics of (TQ_i + weight * IQ_ij) subject to
per-point capacity, at-most-one placement per topic, and binary decisions.
Solved by branch and bound over per-topic choices (each topic has at most
four candidate points plus an explicit discard), run in two phases:

1. value search with regret-first ordering and a suffix-best bound, which
   proves the optimal objective;
2. deterministic reconstruction in topic-id order that returns the
   tie-break-preferred optimal solution (prefer placing lower topic ids,
   then lower point ids).

Discarding every topic is always feasible, so the solver never fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .curation import Topic
from .errors import CapacityViolation, NoCandidates
from .segmentation import InsertionPoint

EPS = 1e-9


@dataclass(frozen=True)
class CandidateSet:
    """Up to four nearby insertion points considered for one topic."""

    topic_id: int
    point_ids: tuple[int, ...]


@dataclass
class Assignment:
    placements: dict[int, int | None]            # topic_id -> point_id or None
    objective: float
    per_point_order: dict[int, list[int]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Candidate selection
# ---------------------------------------------------------------------------

def candidate_points(
    topic: Topic,
    segment_mid_ms: int,
    all_points: list[InsertionPoint],
) -> CandidateSet:
    """Nearest two points at or before the topic's segment midpoint and
    nearest two strictly after; fewer at video edges."""
    ordered = sorted(all_points, key=lambda p: (p.time_ms, p.id))
    before = [p for p in ordered if p.time_ms <= segment_mid_ms][-2:]
    after = [p for p in ordered if p.time_ms > segment_mid_ms][:2]
    ids = tuple(p.id for p in before + after)
    if not ids:
        raise NoCandidates(f"topic {topic.id} has no candidate insertion points")
    return CandidateSet(topic_id=topic.id, point_ids=ids)


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

def _relaxation_bound(
    remaining: list[int],
    options_desc: dict[int, list[tuple[float, int]]],
    lengths: dict[int, float],
    residual: dict[int, float],
) -> float:
    """Admissible upper bound on the reward still collectable.

    Every remaining topic is credited its second-best fitting reward
    outright (discard counts as 0). The extra reward of instead using its
    best-fitting point -- the regret -- is only available to topics whose
    best points jointly fit, which a per-point fractional knapsack over
    regrets bounds from above. Any feasible completion satisfies both
    credits, so the sum dominates the true optimum of the suffix.
    """
    base = 0.0
    contested: dict[int, list[tuple[float, float]]] = {}
    for tid in remaining:
        length = lengths[tid]
        best = second = 0.0
        best_pid = None
        for reward, pid in options_desc[tid]:  # reward-descending
            if length <= residual[pid] + EPS:
                if best_pid is None:
                    best, best_pid = reward, pid
                else:
                    second = reward
                    break
        if best_pid is None:
            continue
        base += second
        if best > second:
            contested.setdefault(best_pid, []).append((best - second, length))
    for pid, items in contested.items():
        room = residual[pid]
        items.sort(key=lambda rl: rl[0] / rl[1], reverse=True)
        for regret, length in items:
            if room <= EPS:
                break
            take = min(1.0, room / length)
            base += regret * take
            room -= length * take
    return base


def _search_value(
    order: list[int],
    options: dict[int, list[tuple[float, int]]],
    lengths: dict[int, float],
    residual: dict[int, float],
) -> float:
    """Phase 1: prove the optimal objective value."""
    n = len(order)
    suffix_best = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        best = max((r for r, _ in options[order[k]]), default=0.0)
        suffix_best[k] = suffix_best[k + 1] + max(0.0, best)

    best_value = 0.0

    # Greedy incumbent so pruning bites from the first branches.
    greedy_residual = dict(residual)
    greedy_value = 0.0
    for tid in order:
        for reward, pid in options[tid]:
            if lengths[tid] <= greedy_residual[pid] + EPS:
                greedy_residual[pid] -= lengths[tid]
                greedy_value += reward
                break
    best_value = max(best_value, greedy_value)

    def dfs(k: int, value: float) -> None:
        nonlocal best_value
        if value + suffix_best[k] <= best_value + EPS:
            return
        if value + _relaxation_bound(order[k:], options, lengths,
                                     residual) <= best_value + EPS:
            return
        if k == n:
            best_value = max(best_value, value)
            return
        tid = order[k]
        for reward, pid in options[tid]:
            if lengths[tid] <= residual[pid] + EPS:
                residual[pid] -= lengths[tid]
                dfs(k + 1, value + reward)
                residual[pid] += lengths[tid]
        dfs(k + 1, value)  # discard

    dfs(0, 0.0)
    return best_value


def _reconstruct(
    order: list[int],
    options: dict[int, list[tuple[float, int]]],
    lengths: dict[int, float],
    residual: dict[int, float],
    target: float,
) -> dict[int, int | None]:
    """Phase 2: first solution reaching the target in preference order.

    Topics are visited in id order; each topic tries its candidate points
    in ascending point id before discard, so the first full solution found
    is the preferred one among all optima.
    """
    n = len(order)
    suffix_best = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        best = max((r for r, _ in options[order[k]]), default=0.0)
        suffix_best[k] = suffix_best[k + 1] + max(0.0, best)

    placements: dict[int, int | None] = {}
    by_pid = {tid: sorted(options[tid], key=lambda rp: rp[1])
              for tid in order}
    by_reward = {tid: sorted(options[tid], key=lambda rp: -rp[0])
                 for tid in order}

    def dfs(k: int, value: float) -> bool:
        if value + suffix_best[k] < target - EPS:
            return False
        if value + _relaxation_bound(order[k:], by_reward, lengths,
                                     residual) < target - EPS:
            return False
        if k == n:
            return value >= target - EPS
        tid = order[k]
        for reward, pid in by_pid[tid]:
            if lengths[tid] <= residual[pid] + EPS:
                residual[pid] -= lengths[tid]
                if dfs(k + 1, value + reward):
                    placements[tid] = pid
                    return True
                residual[pid] += lengths[tid]
        if dfs(k + 1, value):
            placements[tid] = None
            return True
        return False

    if not dfs(0, 0.0):
        raise AssertionError("reconstruction failed to reach the proven optimum")
    return placements


def solve(
    topics: list[Topic],
    points: list[InsertionPoint],
    candidates: dict[int, CandidateSet],
    iq: dict[tuple[int, int], float],
    objective_weight: float = 10.0,
) -> Assignment:
    """Provably optimal placement of topics into insertion points."""
    capacity = {p.id: p.capacity_s for p in points}
    lengths = {t.id: t.length_s for t in topics}
    tq = {t.id: t.scores.tq for t in topics}

    # Per-topic options with their rewards; strictly negative rewards are
    # dominated by discard and never part of any optimum.
    value_options: dict[int, list[tuple[float, int]]] = {}
    tie_options: dict[int, list[tuple[float, int]]] = {}
    for t in topics:
        opts = []
        for pid in candidates[t.id].point_ids:
            reward = tq[t.id] + objective_weight * iq[(t.id, pid)]
            if reward >= -EPS and lengths[t.id] <= capacity[pid] + EPS:
                opts.append((reward, pid))
        tie_options[t.id] = opts
        value_options[t.id] = sorted(
            [o for o in opts if o[0] > EPS], key=lambda rp: -rp[0]
        )

    def regret(tid: int) -> float:
        rewards = sorted((r for r, _ in value_options[tid]), reverse=True)
        if not rewards:
            return 0.0
        return rewards[0] - (rewards[1] if len(rewards) > 1 else 0.0)

    value_order = sorted((t.id for t in topics),
                         key=lambda tid: (-regret(tid), tid))
    optimum = _search_value(value_order, value_options, lengths, dict(capacity))

    id_order = sorted(t.id for t in topics)
    placements = _reconstruct(id_order, tie_options, lengths,
                              dict(capacity), optimum)

    assignment = Assignment(placements=placements, objective=optimum)
    return order_within_points(assignment, topics)


def order_within_points(assignment: Assignment,
                        topics: list[Topic]) -> Assignment:
    """Order co-located topics by topic quality, descending.

    Ties break on the earliest first-comment video time.
    """
    by_id = {t.id: t for t in topics}
    grouped: dict[int, list[int]] = {}
    for tid, pid in sorted(assignment.placements.items()):
        if pid is not None:
            grouped.setdefault(pid, []).append(tid)
    for pid, tids in grouped.items():
        tids.sort(key=lambda tid: (
            -by_id[tid].scores.tq,
            min((c.video_time_ms for c in by_id[tid].comments), default=0),
            tid,
        ))
    assignment.per_point_order = grouped
    return assignment


def validate_assignment(
    assignment: Assignment,
    topics: list[Topic],
    points: list[InsertionPoint],
    candidates: dict[int, CandidateSet] | None = None,
) -> None:
    """Independent feasibility recheck; raises CapacityViolation on breach."""
    by_id = {t.id: t for t in topics}
    capacity = {p.id: p.capacity_s for p in points}
    load: dict[int, float] = {p.id: 0.0 for p in points}
    for tid, pid in assignment.placements.items():
        if pid is None:
            continue
        if candidates is not None and pid not in candidates[tid].point_ids:
            raise CapacityViolation(
                f"topic {tid} placed at non-candidate point {pid}"
            )
        load[pid] += by_id[tid].length_s
    for pid, used in load.items():
        if used > capacity[pid] + 1e-6:
            raise CapacityViolation(
                f"point {pid} overloaded: {used:.3f}s > {capacity[pid]:.3f}s"
            )


def dump_instance(
    topics: list[Topic],
    points: list[InsertionPoint],
    candidates: dict[int, CandidateSet],
    iq: dict[tuple[int, int], float],
    assignment: Assignment,
) -> str:
    """Reproducibility report: the full instance and its solution as JSON."""
    doc = {
        "topics": [
            {"id": t.id, "length_s": t.length_s, "tq": t.scores.tq}
            for t in topics
        ],
        "points": [
            {"id": p.id, "kind": p.kind, "capacity_s": p.capacity_s}
            for p in points
        ],
        "candidates": {str(tid): list(c.point_ids)
                       for tid, c in sorted(candidates.items())},
        "iq": {f"{tid},{pid}": v for (tid, pid), v in sorted(iq.items())},
        "placements": {str(tid): pid
                       for tid, pid in sorted(assignment.placements.items())},
        "objective": round(assignment.objective, 9),
        "per_point_order": {str(pid): tids
                            for pid, tids in sorted(
                                assignment.per_point_order.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True)
