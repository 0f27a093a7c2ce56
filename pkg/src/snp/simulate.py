"""Synthetic referral cascades on random social graphs.

Generates small-world or preferential-attachment graphs, runs a
breadth-ordered diffusion under a flat or recursive incentive model, and
emits an event log the engine can replay. Everything is deterministic in
(graph seed, rng seed).
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .events import EventRecord, ReplayError, replay
from .graph import ReferralGraph

SIM_START = datetime(2020, 1, 1, tzinfo=timezone.utc)


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class GraphSpec:
    model: str  # "small_world" | "scale_free"
    n: int
    k: Optional[int] = None  # small_world: even neighbor count
    beta: Optional[float] = None  # small_world: rewiring probability
    m: Optional[int] = None  # scale_free: edges per new node
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise SimulationError("n must be >= 2")
        if self.model == "small_world":
            if self.k is None or self.beta is None:
                raise SimulationError("small_world needs k and beta")
            if self.k % 2 or not 0 < self.k < self.n:
                raise SimulationError("k must be even and 0 < k < n")
            if not 0 <= self.beta <= 1:
                raise SimulationError("beta must be in [0, 1]")
        elif self.model == "scale_free":
            if self.m is None or not 1 <= self.m < self.n:
                raise SimulationError("scale_free needs 1 <= m < n")
        else:
            raise SimulationError(f"unknown graph model {self.model!r}")


def generate_graph(spec: GraphSpec) -> list[set[int]]:
    """Undirected graph as adjacency sets, deterministic per seed."""
    rng = random.Random(spec.seed)
    adj: list[set[int]] = [set() for _ in range(spec.n)]

    def add(u: int, v: int) -> None:
        adj[u].add(v)
        adj[v].add(u)

    if spec.model == "small_world":
        n, k = spec.n, spec.k
        # Ring lattice, then rewire each lattice edge with probability beta.
        for j in range(1, k // 2 + 1):
            for u in range(n):
                add(u, (u + j) % n)
        for j in range(1, k // 2 + 1):
            for u in range(n):
                v = (u + j) % n
                if rng.random() < spec.beta:
                    w = rng.randrange(n)
                    tries = 0
                    while w == u or w in adj[u]:
                        w = rng.randrange(n)
                        tries += 1
                        if tries > 8 * n:  # saturated neighborhood, keep edge
                            break
                    else:
                        adj[u].discard(v)
                        adj[v].discard(u)
                        add(u, w)
    else:
        n, m = spec.n, spec.m
        # Preferential attachment via the repeated-endpoints trick; the
        # first arrival connects to all m founding nodes.
        repeated: list[int] = []
        targets = list(range(m))
        for u in range(m, n):
            for v in sorted(set(targets)):
                add(u, v)
                repeated.extend((u, v))
            seen: set[int] = set()
            while len(seen) < m:
                pick = rng.choice(repeated)
                if pick not in seen:
                    seen.add(pick)
            targets = sorted(seen)
        # (the last sampled targets are unused once every node is placed)
    return adj


@dataclass(frozen=True)
class IncentiveModel:
    """Per-neighbor share probability under a flat or recursive reward.

    A flat referral bonus pays the direct referrer only, so a sharer
    values exactly one hop of chain; the recursive scheme pays the whole
    geometric tail below them, worth chain_base / (1 - decay), which is
    what keeps deep intermediaries forwarding the link.
    """

    kind: str  # "flat" | "recursive"
    p_click: float
    p_join: float
    base_share: float
    decay: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.kind not in ("flat", "recursive"):
            raise SimulationError(f"unknown incentive kind {self.kind!r}")
        for name in ("p_click", "p_join", "base_share"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise SimulationError(f"{name} must be in [0, 1]")
        if not 0 < self.decay < 1:
            raise SimulationError("decay must be strictly between 0 and 1")

    def share_probability(self, depth: int) -> float:
        if self.kind == "flat":
            return self.base_share
        tail = 1 / (1 - float(self.decay))  # sum of decay^(j-1), j >= 1
        return min(1.0, self.base_share * tail)


@dataclass(frozen=True)
class ProposalModel:
    """Optional proposal activity for joined recruits.

    A recruit authors with p_author; an authored proposal reaches the
    finalist stage with p_finalist + depth_gain * (degrees - 1), clamped
    to [0, 1]. depth_gain = 0 is the null model (depth-independent
    quality); positive values let experiments probe whether deeper
    recruits submit stronger work.
    """

    p_author: float = 0.0
    p_finalist: float = 0.0
    depth_gain: float = 0.0

    def __post_init__(self):
        for name in ("p_author", "p_finalist"):
            if not 0 <= getattr(self, name) <= 1:
                raise SimulationError(f"{name} must be in [0, 1]")

    def finalist_probability(self, degrees: int) -> float:
        return min(1.0, max(0.0, self.p_finalist + self.depth_gain * (degrees - 1)))


@dataclass
class CascadeResult:
    events: list[EventRecord]
    max_depth: int
    recruits_by_depth: Counter = field(default_factory=Counter)
    total_informed: int = 0

    @property
    def recruits(self) -> int:
        return sum(self.recruits_by_depth.values())

    @property
    def indirect_recruits(self) -> int:
        """Joined at layer >= 1, i.e. two or more degrees from the staff root."""
        return sum(v for d, v in self.recruits_by_depth.items() if d >= 1)


def simulate(
    adj: Sequence[set[int]],
    incentive: IncentiveModel,
    seeds: Sequence[int],
    rng_seed: int,
    proposals: Optional[ProposalModel] = None,
) -> CascadeResult:
    """Breadth-ordered cascade; emits a replayable event log.

    Seed nodes are informed by the staff link (layer 0). An informed node
    clicks with p_click; having landed it may join (p_join) and offers
    the link to each still-uninformed neighbor with the incentive's share
    probability. Ticks advance two synthetic seconds per layer so clicks
    always precede same-node registrations.
    """
    if not seeds:
        raise SimulationError("seed set must be nonempty")
    n = len(adj)
    if any(not 0 <= s < n for s in seeds):
        raise SimulationError("seed outside node range")

    rng = random.Random(rng_seed)
    records: list[EventRecord] = []
    serial = 0

    def emit(etype: str, at: datetime, **payload) -> None:
        nonlocal serial
        serial += 1
        records.append(EventRecord(seq=serial, ts=at, type=etype, payload=payload))

    emit("link_created", SIM_START, token="t:staff", owner_visitor="sim:staff",
         email_hash="eh:staff", staff=True)

    informed: dict[int, str] = {}  # node -> token that reached it
    for s in sorted(set(seeds)):
        informed[s] = "t:staff"
    frontier = sorted(set(seeds))
    depth = 0
    max_depth = 0
    recruits_by_depth: Counter = Counter()

    while frontier:
        t_click = SIM_START + timedelta(seconds=2 * (depth + 1))
        t_act = t_click + timedelta(seconds=1)
        next_frontier: list[int] = []
        joins: list[int] = []
        sharers: list[int] = []
        # Pass 1: all of the layer's clicks (and the layer's rng draws, in
        # node order); pass 2 emits the follow-up events one tick later so
        # log timestamps stay monotone.
        for u in frontier:
            if rng.random() >= incentive.p_click:
                continue
            emit("click", t_click, token=informed[u], visitor=f"n{u}")
            max_depth = max(max_depth, depth)
            if rng.random() < incentive.p_join:
                joins.append(u)
                recruits_by_depth[depth] += 1
            p_share = incentive.share_probability(depth + 1)
            recipients = [
                v for v in sorted(adj[u])
                if v not in informed and rng.random() < p_share
            ]
            if recipients:
                sharers.append(u)
                for v in recipients:
                    informed[v] = f"t{u}"
                    next_frontier.append(v)
        for u in joins:
            emit("member_registered", t_act, visitor=f"n{u}", member=f"nm{u}")
        for u in sharers:
            emit("link_created", t_act, token=f"t{u}", owner_visitor=f"n{u}",
                 email_hash=f"eh{u}")
        if proposals is not None and proposals.p_author > 0:
            t_prop = t_act + timedelta(microseconds=1)
            for u in joins:
                if rng.random() < proposals.p_author:
                    emit("proposal_authored", t_prop, member=f"nm{u}", proposal=f"pr{u}")
                    if rng.random() < proposals.finalist_probability(depth + 1):
                        emit("proposal_result", t_prop, proposal=f"pr{u}", status="finalist")
        frontier = sorted(next_frontier)
        depth += 1

    return CascadeResult(
        events=records,
        max_depth=max_depth,
        recruits_by_depth=recruits_by_depth,
        total_informed=len(informed),
    )


def emitted_log_validates(result: CascadeResult) -> bool:
    """True iff the emitted log replays cleanly and the forest holds."""
    try:
        g = replay(result.events)
        g.check_forest()
        _check_attribution(g)
    except Exception:
        return False
    return True


def _check_attribution(g: ReferralGraph) -> None:
    for edge in g.edges.values():
        child = g.participants[edge.child]
        if child.first_click_at != edge.established_at:
            raise ReplayError(f"edge for {edge.child!r} not at first click")
        if edge.child == edge.parent:
            raise ReplayError("self edge")


@dataclass
class TrialRow:
    trial: int
    incentive: str
    max_depth: int
    recruits: int
    indirect_recruits: int
    total_informed: int


def trial_inputs(
    spec: GraphSpec, trial: int, seeds_per_trial: int, rng_seed: int
) -> tuple[list[set[int]], list[int], int]:
    """Pinned (graph, seed nodes, sim seed) for one trial index."""
    gspec = GraphSpec(
        model=spec.model, n=spec.n, k=spec.k, beta=spec.beta, m=spec.m,
        seed=spec.seed + trial,
    )
    adj = generate_graph(gspec)
    picker = random.Random((rng_seed << 16) ^ trial)
    seeds = picker.sample(range(spec.n), min(seeds_per_trial, spec.n))
    return adj, seeds, rng_seed + 7919 * trial


def run_trials(
    spec: GraphSpec,
    incentive: IncentiveModel,
    trials: int,
    seeds_per_trial: int = 10,
    rng_seed: int = 0,
    proposals: Optional[ProposalModel] = None,
    on_result=None,
) -> list[TrialRow]:
    """Independent pinned-seed trials; trial i regenerates graph and seeds."""
    rows = []
    for i in range(trials):
        adj, seeds, sim_seed = trial_inputs(spec, i, seeds_per_trial, rng_seed)
        res = simulate(adj, incentive, seeds, rng_seed=sim_seed, proposals=proposals)
        if on_result is not None:
            on_result(i, res)
        rows.append(
            TrialRow(
                trial=i,
                incentive=incentive.kind,
                max_depth=res.max_depth,
                recruits=res.recruits,
                indirect_recruits=res.indirect_recruits,
                total_informed=res.total_informed,
            )
        )
    return rows


def bootstrap_mean_ci(
    values: Sequence[float], n_boot: int = 10_000, seed: int = 0, alpha: float = 0.05
) -> tuple[float, float]:
    """Percentile bootstrap CI for the mean."""
    arr = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(arr), size=(n_boot, len(arr)))
    means = arr[idx].mean(axis=1)
    lo, hi = np.quantile(means, [alpha / 2, 1 - alpha / 2])
    return float(lo), float(hi)


def compare_incentives(
    spec: GraphSpec,
    flat: IncentiveModel,
    recursive: IncentiveModel,
    trials: int = 200,
    seeds_per_trial: int = 10,
    rng_seed: int = 0,
) -> dict:
    """Paired flat-vs-recursive comparison on identical graphs and seeds."""
    flat_rows = run_trials(spec, flat, trials, seeds_per_trial, rng_seed)
    rec_rows = run_trials(spec, recursive, trials, seeds_per_trial, rng_seed)
    diffs = [r.indirect_recruits - f.indirect_recruits for r, f in zip(rec_rows, flat_rows)]
    depth_diffs = [r.max_depth - f.max_depth for r, f in zip(rec_rows, flat_rows)]
    ci = bootstrap_mean_ci(diffs, seed=rng_seed)
    return {
        "trials": trials,
        "flat_mean_indirect": float(np.mean([r.indirect_recruits for r in flat_rows])),
        "recursive_mean_indirect": float(np.mean([r.indirect_recruits for r in rec_rows])),
        "mean_indirect_diff": float(np.mean(diffs)),
        "indirect_diff_ci95": ci,
        "mean_depth_diff": float(np.mean(depth_diffs)),
        "depth_diff_ci95": bootstrap_mean_ci(depth_diffs, seed=rng_seed + 1),
        "flat_rows": flat_rows,
        "recursive_rows": rec_rows,
    }
