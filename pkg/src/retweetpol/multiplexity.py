"""Cross-month co-membership counting and core-user extraction.

The full all-pairs matrix over every user ever labeled is never built:
restricting the universe to users active in at least k_min months keeps the
pairwise counting tractable, and no pair that could reach a threshold
k >= k_min is lost because both its activities bound the count from above.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .ingest import UserMeta
from .labels import Label

logger = logging.getLogger(__name__)

META_COVERAGE_WARN = 0.90


@dataclass
class MultiplexityMatrix:
    """Sparse symmetric same-community month counts over the restricted
    user universe, plus per-user activity and label history tallies."""

    user_ids: list[str]                      # sorted universe
    activity: list[int]                      # months labeled, per user
    novax_months: list[int]                  # months labeled NoVax, per user
    pair_counts: dict[tuple[int, int], int]  # i < j -> co-membership months
    months_total: int
    k_min: int

    def index_of(self, user_id: str) -> int:
        return self._index[user_id]

    def __post_init__(self):
        self._index = {u: i for i, u in enumerate(self.user_ids)}

    def count(self, u: str, v: str) -> int:
        i, j = self._index[u], self._index[v]
        if i == j:
            raise ValueError("diagonal entries are not stored")
        if i > j:
            i, j = j, i
        return self.pair_counts.get((i, j), 0)


def build_restricted_multiplexity(
    labelings: Sequence[Mapping[str, Label]], k_min: int
) -> MultiplexityMatrix:
    """Pairwise same-label month counts over users active in >= k_min months.

    ``labelings`` maps user_id -> label for each month in order.
    """
    months_total = len(labelings)
    if not 1 <= k_min <= months_total:
        raise ValueError(f"k_min must lie in 1..{months_total}, got {k_min}")
    activity_all: dict[str, int] = {}
    for monthly in labelings:
        for uid in monthly:
            activity_all[uid] = activity_all.get(uid, 0) + 1
    universe = sorted(u for u, a in activity_all.items() if a >= k_min)
    index = {u: i for i, u in enumerate(universe)}
    activity = [0] * len(universe)
    novax_months = [0] * len(universe)
    pair_counts: dict[tuple[int, int], int] = {}
    for monthly in labelings:
        groups: dict[Label, list[int]] = {Label.NOVAX: [], Label.PROVAX: []}
        for uid, lab in monthly.items():
            i = index.get(uid)
            if i is None:
                continue
            activity[i] += 1
            if lab is Label.NOVAX:
                novax_months[i] += 1
            groups[lab].append(i)
        for members in groups.values():
            members.sort()
            for a in range(len(members)):
                ia = members[a]
                for b in range(a + 1, len(members)):
                    key = (ia, members[b])
                    pair_counts[key] = pair_counts.get(key, 0) + 1
    return MultiplexityMatrix(
        user_ids=universe,
        activity=activity,
        novax_months=novax_months,
        pair_counts=pair_counts,
        months_total=months_total,
        k_min=k_min,
    )


@dataclass
class CoreComponent:
    members: list[str]            # sorted user_ids
    threshold: int
    fraction_novax: float         # over member-months
    fraction_provax: float
    avg_followers: float | None = None
    verified_fraction: float | None = None
    top_followed: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def majority(self) -> Label:
        return Label.NOVAX if self.fraction_novax >= 0.5 else Label.PROVAX


def threshold_components(
    matrix: MultiplexityMatrix,
    k: int,
    user_meta: Mapping[str, UserMeta] | None = None,
) -> list[CoreComponent]:
    """Connected components of the graph linking pairs with count >= k,
    sorted by size descending (ties: smallest member user_id).

    Composition fractions average over member-months; follower / verified
    statistics come from ``user_meta`` when provided.
    """
    if k > matrix.months_total:
        raise ValueError(f"threshold {k} exceeds the month count {matrix.months_total}")
    if k < matrix.k_min:
        raise ValueError(
            f"threshold {k} below the matrix restriction k_min={matrix.k_min}; "
            "rebuild the matrix with a smaller k_min"
        )
    n = len(matrix.user_ids)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    in_graph = [False] * n
    for (i, j), c in matrix.pair_counts.items():
        if c >= k:
            in_graph[i] = in_graph[j] = True
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        if in_graph[v]:
            groups.setdefault(find(v), []).append(v)
    comps = []
    for members in groups.values():
        ids = sorted(matrix.user_ids[v] for v in members)
        member_months = sum(matrix.activity[v] for v in members)
        novax = sum(matrix.novax_months[v] for v in members)
        frac_n = novax / member_months if member_months else 0.0
        comp = CoreComponent(
            members=ids,
            threshold=k,
            fraction_novax=frac_n,
            fraction_provax=1.0 - frac_n,
        )
        if user_meta is not None:
            _attach_meta(comp, user_meta)
        comps.append(comp)
    comps.sort(key=lambda c: (-c.size, c.members[0]))
    return comps


def _attach_meta(comp: CoreComponent, user_meta: Mapping[str, UserMeta]) -> None:
    known = [user_meta[u] for u in comp.members if u in user_meta]
    if not known:
        return
    comp.avg_followers = sum(m.followers for m in known) / len(known)
    comp.verified_fraction = sum(1 for m in known if m.verified) / len(known)
    top = sorted(known, key=lambda m: (-m.followers, m.user_id))[:3]
    comp.top_followed = [m.user_id for m in top]


@dataclass
class CoreSideStats:
    label: Label
    users: int
    avg_followers: float | None
    verified_fraction: float | None
    top_followed: list[str]


def core_stats(
    components: Sequence[CoreComponent],
    user_meta: Mapping[str, UserMeta],
) -> dict:
    """Follower / verified statistics per component and per core side.

    Components are pooled into their majority side.  Warns when metadata
    covers less than 90% of the members involved.
    """
    all_members = sorted({u for c in components for u in c.members})
    if all_members:
        covered = sum(1 for u in all_members if u in user_meta)
        if covered / len(all_members) < META_COVERAGE_WARN:
            logger.warning(
                "user metadata covers only %d/%d core members",
                covered, len(all_members),
            )
    for comp in components:
        if comp.avg_followers is None:
            _attach_meta(comp, user_meta)
    sides = {}
    for label in (Label.NOVAX, Label.PROVAX):
        members = sorted(
            {u for c in components if c.majority is label for u in c.members}
        )
        known = [user_meta[u] for u in members if u in user_meta]
        top = sorted(known, key=lambda m: (-m.followers, m.user_id))[:3]
        sides[label.value] = CoreSideStats(
            label=label,
            users=len(members),
            avg_followers=(sum(m.followers for m in known) / len(known)) if known else None,
            verified_fraction=(sum(1 for m in known if m.verified) / len(known)) if known else None,
            top_followed=[m.user_id for m in top],
        )
    return {"components": list(components), "sides": sides}
