"""Opportunistic cost calculus over distributing sets.

A distributing set is an ordered list of candidate next hops. An attempt
succeeds when at least one candidate succeeds, and the first successful
candidate in list order is used. That gives

* set cost ``1 / (1 - prod(1 - p_j))``: expected number of attempts
* selection probability ``phi_j = p_j prod_{k<j}(1 - p_k) / (1 - prod(1 - p_k))``
* relay cost ``sum_j phi_j * downstream_j``

and their usability-weighted versions, where every ``p_j`` becomes
``p_j * omega_j``.

Infinite costs are returned as ``math.inf``; selection probabilities are
undefined when no candidate can succeed and raise instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

INF = math.inf


class CostError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeQuality:
    p: float
    omega: float = 1.0

    def __post_init__(self):
        for name in ("p", "omega"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise CostError(f"{name} must lie in [0, 1], got {v}")

    @property
    def weighted(self) -> float:
        return self.p * self.omega


class Candidate(NamedTuple):
    node: int
    quality: EdgeQuality
    downstream: float


def _check_ps(ps):
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise CostError(f"probability must lie in [0, 1], got {p}")


def _numerators(ps) -> list[float]:
    # p_j * prod_{k<j}(1 - p_k); their sum telescopes to 1 - prod(1 - p_k)
    out = []
    miss = 1.0
    for p in ps:
        out.append(p * miss)
        miss *= 1.0 - p
    return out


def _set_cost(ps) -> float:
    total = sum(_numerators(ps))
    return INF if total <= 0.0 else 1.0 / total


def _selection(ps) -> list[float]:
    nums = _numerators(ps)
    total = sum(nums)
    if total <= 0.0:
        raise CostError("selection probability undefined: no candidate can succeed")
    return [x / total for x in nums]


def _relay(ps, downstream) -> float:
    if not ps:
        raise CostError("relay cost of an empty distributing set")
    acc = 0.0
    for phi, d in zip(_selection(ps), downstream):
        if phi > 0.0:
            acc += phi * d
    return acc


def set_cost(ps: Sequence[float]) -> float:
    _check_ps(ps)
    return _set_cost(ps)


def selection_probabilities(ps: Sequence[float]) -> list[float]:
    _check_ps(ps)
    return _selection(ps)


def selection_probability(ps: Sequence[float], j: int) -> float:
    if not 0 <= j < len(ps):
        raise CostError(f"candidate index {j} out of range for {len(ps)} candidates")
    return selection_probabilities(ps)[j]


def relay_cost(cands: Sequence[Candidate]) -> float:
    """Unweighted relay cost, usability ignored."""
    ps = [c.quality.p for c in cands]
    return _relay(ps, [c.downstream for c in cands])


def total_cost_unweighted(cands: Sequence[Candidate]) -> float:
    ps = [c.quality.p for c in cands]
    head = _set_cost(ps)
    if head == INF:
        return INF
    return head + _relay(ps, [c.downstream for c in cands])


def pair_cost(q: EdgeQuality) -> float:
    w = q.weighted
    return INF if w <= 0.0 else 1.0 / w


def weighted_set_cost(qs: Sequence[EdgeQuality]) -> float:
    return _set_cost([q.weighted for q in qs])


def weighted_selection_probabilities(qs: Sequence[EdgeQuality]) -> list[float]:
    return _selection([q.weighted for q in qs])


def weighted_selection_probability(qs: Sequence[EdgeQuality], j: int) -> float:
    if not 0 <= j < len(qs):
        raise CostError(f"candidate index {j} out of range for {len(qs)} candidates")
    return weighted_selection_probabilities(qs)[j]


def weighted_relay_cost(cands: Sequence[Candidate]) -> float:
    return _relay([c.quality.weighted for c in cands], [c.downstream for c in cands])


def weighted_total_cost(cands: Sequence[Candidate]) -> float:
    """Set cost plus relay cost with usability-weighted probabilities."""
    ws = [c.quality.weighted for c in cands]
    head = _set_cost(ws)
    if head == INF:
        return INF
    return head + _relay(ws, [c.downstream for c in cands])


def priority_order(cands: Sequence[Candidate]) -> list[Candidate]:
    """Order candidates by ascending downstream cost, then node id.

    Trying cheaper relays first minimises the total cost of a fixed set; the
    label-setting search appends candidates in exactly this order.
    """
    return sorted(cands, key=lambda c: (c.downstream, c.node))
