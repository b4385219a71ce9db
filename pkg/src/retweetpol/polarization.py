"""Community edge densities, polarization score and productivity tables.

Densities are unweighted: the score compares how complete each community is
internally against how connected the two communities are to each other,
yielding a value in [-1, 1] (1 = fully separated, -1 = only cross ties).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from .graph import MonthlyGraph
from .ingest import MonthBucket, tweet_counts
from .labels import Label
from .leaning import CommunityLabeling

logger = logging.getLogger(__name__)


class DegenerateLabelingError(ValueError):
    """A community has no members."""


class UndefinedScoreError(ValueError):
    """All three densities are zero."""


@dataclass
class PolarizationReport:
    month_index: int
    v_n: int
    v_p: int
    e_n: float
    e_p: float
    e_o: float
    score: float
    tweets_n: int | None = None
    tweets_p: int | None = None


def community_densities(
    g: MonthlyGraph, labeling: CommunityLabeling
) -> tuple[float, float, float]:
    """(E_n, E_p, E_o): within-NoVax, within-ProVax and cross edge densities.

    Internal densities normalize by C(V, 2); the cross density by V_n * V_p.
    A size-0 community is an error; a size-1 community yields internal
    density 0 with a warning.
    """
    if labeling.node_ids != g.node_ids:
        raise ValueError("labeling does not cover this graph's nodes")
    is_novax = [lab is Label.NOVAX for lab in labeling.labels]
    v_n = sum(is_novax)
    v_p = g.n - v_n
    if v_n == 0 or v_p == 0:
        raise DegenerateLabelingError(
            f"month {g.month_index}: community sizes {v_n}/{v_p}"
        )
    within_n = within_p = cross = 0
    for u, v, _w in g.edge_list():
        if is_novax[u] and is_novax[v]:
            within_n += 1
        elif not is_novax[u] and not is_novax[v]:
            within_p += 1
        else:
            cross += 1
    if v_n < 2:
        logger.warning("month %d: NoVax community of size 1, E_n set to 0", g.month_index)
        e_n = 0.0
    else:
        e_n = within_n / (v_n * (v_n - 1) / 2)
    if v_p < 2:
        logger.warning("month %d: ProVax community of size 1, E_p set to 0", g.month_index)
        e_p = 0.0
    else:
        e_p = within_p / (v_p * (v_p - 1) / 2)
    e_o = cross / (v_n * v_p)
    return e_n, e_p, e_o


def polarization_score(e_n: float, e_p: float, e_o: float) -> float:
    """(E_n + E_p - E_o) / (E_n + E_p + E_o)."""
    total = e_n + e_p + e_o
    if total <= 0:
        raise UndefinedScoreError("all densities are zero")
    return (e_n + e_p - e_o) / total


def month_report(
    g: MonthlyGraph, labeling: CommunityLabeling, bucket: MonthBucket | None = None
) -> PolarizationReport:
    """Full per-month polarization row; tweet counts included when the
    month's bucket is supplied."""
    e_n, e_p, e_o = community_densities(g, labeling)
    v_n = sum(1 for lab in labeling.labels if lab is Label.NOVAX)
    v_p = g.n - v_n
    tweets_n = tweets_p = None
    if bucket is not None:
        tweets_n, tweets_p = _productivity(labeling.as_mapping(), bucket)
    return PolarizationReport(
        month_index=g.month_index,
        v_n=v_n,
        v_p=v_p,
        e_n=e_n,
        e_p=e_p,
        e_o=e_o,
        score=polarization_score(e_n, e_p, e_o),
        tweets_n=tweets_n,
        tweets_p=tweets_p,
    )


def _productivity(user_labels: Mapping[str, Label], bucket: MonthBucket) -> tuple[int, int]:
    counts = tweet_counts(bucket)
    tweets_n = tweets_p = 0
    for uid, c in counts.items():
        lab = user_labels.get(uid)
        if lab is Label.NOVAX:
            tweets_n += c
        elif lab is Label.PROVAX:
            tweets_p += c
    return tweets_n, tweets_p


@dataclass
class ProportionRow:
    month_index: int
    prop_n: float | None
    prop_p: float | None
    tweets_n: int | None
    tweets_p: int | None


def proportions_and_productivity(
    labelings: Mapping[int, CommunityLabeling],
    buckets: Sequence[MonthBucket],
) -> list[ProportionRow]:
    """Per month: community size shares and tweet counts authored by labeled
    users (originals and retweets both count).  Months without a labeling
    yield a null row with a warning."""
    rows = []
    for bucket in buckets:
        labeling = labelings.get(bucket.month_index)
        if labeling is None:
            logger.warning("month %d has no labeling; emitting nulls", bucket.month_index)
            rows.append(ProportionRow(bucket.month_index, None, None, None, None))
            continue
        v_n = sum(1 for lab in labeling.labels if lab is Label.NOVAX)
        v_p = len(labeling.labels) - v_n
        total = v_n + v_p
        tweets_n, tweets_p = _productivity(labeling.as_mapping(), bucket)
        rows.append(
            ProportionRow(
                bucket.month_index,
                v_n / total if total else None,
                v_p / total if total else None,
                tweets_n,
                tweets_p,
            )
        )
    return rows
