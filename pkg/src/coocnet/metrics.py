"""Centralities and graph-level statistics on hop distances."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import DataError
from .graph import CoGraph, connected_components


@dataclass(frozen=True)
class CentralityVector:
    kind: str
    values: np.ndarray
    normalized: bool

    def __post_init__(self):
        self.values.setflags(write=False)

    def as_dict(self, labels) -> dict[str, float]:
        return dict(zip(labels, self.values.tolist()))


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float | None
    r_squared: float | None
    points: int = 0

    @property
    def available(self) -> bool:
        return self.exponent is not None


@dataclass(frozen=True)
class AverageDegree:
    standard: float  # 2m / n
    ratio: float     # m / n


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    diameter: int | None
    avg_degree: AverageDegree
    avg_path_length: float | None
    degree_histogram: dict[int, int]
    powerlaw: PowerLawFit
    components: int = 0
    largest_component_size: int = 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "components": self.components,
            "largest_component_size": self.largest_component_size,
            "diameter": self.diameter,
            "avg_degree_2m_over_n": self.avg_degree.standard,
            "avg_degree_m_over_n": self.avg_degree.ratio,
            "avg_path_length": self.avg_path_length,
            "powerlaw_exponent": self.powerlaw.exponent,
            "powerlaw_r2": self.powerlaw.r_squared,
            "powerlaw_points": self.powerlaw.points,
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
        }


@dataclass(frozen=True)
class DistanceSummary:
    """Per-node BFS totals: reachable count (incl. self), distance sum, eccentricity."""

    reach: np.ndarray
    total: np.ndarray
    eccentricity: np.ndarray


def distance_summary(g: CoGraph, workers: int = 1) -> DistanceSummary:
    _kernels.set_threads(workers)
    sources = np.arange(g.n, dtype=np.int64)
    reach, total, ecc = _kernels.bfs_summary(g.indptr, g.indices, sources)
    return DistanceSummary(reach, total, ecc)


def closeness(g: CoGraph, wf_improved: bool = True, summary: DistanceSummary | None = None,
              workers: int = 1) -> CentralityVector:
    r"""Closeness centrality on hop distances.

    For a node in a component of ``n_c`` nodes,

    .. math::

        C(v) = \frac{n_c - 1}{\sum_u d(v, u)} \cdot \frac{n_c - 1}{n - 1}

    The second factor (Wasserman and Faust scaling) is dropped when
    ``wf_improved`` is false. Isolated nodes score 0.
    """
    s = summary or distance_summary(g, workers)
    n = g.n
    vals = np.zeros(n, np.float64)
    ok = s.total > 0
    nc1 = (s.reach[ok] - 1).astype(np.float64)
    vals[ok] = nc1 / s.total[ok]
    if wf_improved and n > 1:
        vals[ok] *= nc1 / (n - 1)
    return CentralityVector("closeness", vals, wf_improved)


def betweenness(g: CoGraph, normalized: bool = True, workers: int = 1) -> CentralityVector:
    """Exact Brandes betweenness over unweighted shortest paths.

    Each unordered pair is counted once. With ``normalized`` the values are
    divided by ``(n - 1)(n - 2) / 2``.
    """
    n = g.n
    if n == 0:
        return CentralityVector("betweenness", np.zeros(0), normalized)
    _kernels.set_threads(workers)
    partial = _kernels.brandes_partials(g.indptr, g.indices)
    vals = np.zeros(n, np.float64)
    for row in partial:  # fixed reduction order
        vals += row
    vals /= 2.0
    if normalized and n > 2:
        vals /= (n - 1) * (n - 2) / 2.0
    return CentralityVector("betweenness", vals, normalized)


def degree_histogram(g: CoGraph) -> dict[int, int]:
    deg = g.degree()
    counts = np.bincount(deg) if deg.size else np.zeros(0, np.int64)
    return {int(k): int(c) for k, c in enumerate(counts.tolist()) if c}


def powerlaw_fit(hist: dict[int, float], k_min: int = 1) -> PowerLawFit:
    """Least-squares line through ``(log k, log P(k))`` for ``k >= k_min``.

    ``P(k)`` is the histogram normalised to sum 1 over all degrees. Needs at
    least three distinct degrees with non-zero count, otherwise the fit is
    reported unavailable.
    """
    total = float(sum(hist.values()))
    pts = sorted((k, c) for k, c in hist.items() if k >= max(k_min, 1) and c > 0)
    if len(pts) < 3 or total <= 0:
        return PowerLawFit(None, None, len(pts))
    x = np.log(np.array([k for k, _ in pts], np.float64))
    y = np.log(np.array([c for _, c in pts], np.float64) / total)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    resid = y - (ym + slope * (x - xm))
    ss_res = float((resid ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    # flat series: perfect when residuals vanish
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res <= 1e-24 else 0.0)
    return PowerLawFit(-slope + 0.0, r2, len(pts))


def _largest_members(g: CoGraph) -> np.ndarray:
    comps = connected_components(g)
    if comps.count == 0:
        return np.empty(0, np.int64)
    return comps.members(comps.largest)


def diameter(g: CoGraph, summary: DistanceSummary | None = None) -> int | None:
    """Largest eccentricity inside the largest component (None if empty)."""
    nodes = _largest_members(g)
    if nodes.size == 0:
        return None
    s = summary or distance_summary(g)
    return int(s.eccentricity[nodes].max())


def average_degree(g: CoGraph) -> AverageDegree:
    if g.n < 1:
        raise ValueError("average degree needs at least one node")
    return AverageDegree(2.0 * g.m / g.n, g.m / g.n)


def average_path_length(g: CoGraph, summary: DistanceSummary | None = None) -> float | None:
    """Mean hop distance over node pairs of the largest component.

    Returns None when that component has fewer than two nodes.
    """
    nodes = _largest_members(g)
    nc = nodes.size
    if nc < 2:
        return None
    s = summary or distance_summary(g)
    return float(s.total[nodes].sum()) / (nc * (nc - 1))


def graph_stats(g: CoGraph, k_min: int = 1, summary: DistanceSummary | None = None,
                workers: int = 1) -> GraphStats:
    s = summary or distance_summary(g, workers)
    comps = connected_components(g)
    hist = degree_histogram(g)
    return GraphStats(
        n=g.n, m=g.m,
        diameter=diameter(g, s),
        avg_degree=average_degree(g) if g.n else AverageDegree(math.nan, math.nan),
        avg_path_length=average_path_length(g, s),
        degree_histogram=hist,
        powerlaw=powerlaw_fit(hist, k_min),
        components=comps.count,
        largest_component_size=int(comps.sizes[comps.largest]) if comps.count else 0,
    )


@dataclass(frozen=True)
class MetricsReport:
    closeness: CentralityVector
    closeness_raw: CentralityVector
    betweenness: CentralityVector
    betweenness_raw: CentralityVector
    stats: GraphStats
    extra: dict = field(default_factory=dict)

    def vectors(self) -> dict[str, CentralityVector]:
        return {"closeness": self.closeness, "closeness_raw": self.closeness_raw,
                "betweenness": self.betweenness, "betweenness_raw": self.betweenness_raw}


def compute_metrics(g: CoGraph, k_min: int = 1, workers: int = 1) -> MetricsReport:
    """All centralities and statistics with one shared distance sweep."""
    s = distance_summary(g, workers)
    b = betweenness(g, normalized=False, workers=workers)
    n = g.n
    bn = b.values / ((n - 1) * (n - 2) / 2.0) if n > 2 else b.values.copy()
    return MetricsReport(
        closeness=closeness(g, True, s),
        closeness_raw=closeness(g, False, s),
        betweenness=CentralityVector("betweenness", bn, True),
        betweenness_raw=b,
        stats=graph_stats(g, k_min, s),
    )


# -- serialization -----------------------------------------------------------

def _json_float(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def metrics_to_json(report: MetricsReport, labels) -> dict:
    stats = {k: _json_float(v) for k, v in report.stats.to_json().items()}
    return {
        "graph_stats": stats,
        "nodes": list(labels),
        "centrality": {name: cv.values.tolist() for name, cv in report.vectors().items()},
    }


def write_metrics_json(report: MetricsReport, labels, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(metrics_to_json(report, labels), fh, ensure_ascii=False, indent=2,
                  sort_keys=True)
        fh.write("\n")


def read_metrics_json(path) -> tuple[list[str], dict[str, CentralityVector], dict]:
    """Return node labels, centrality vectors and the graph statistics."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        labels = doc["nodes"]
        vectors = {name: CentralityVector(name.removesuffix("_raw"), np.asarray(v, np.float64),
                                          not name.endswith("_raw"))
                   for name, v in doc["centrality"].items()}
        stats = doc["graph_stats"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed metrics file ({exc})") from None
    for name, cv in vectors.items():
        if cv.values.size != len(labels):
            raise DataError(f"{path}: vector {name!r} does not match the node list")
    return labels, vectors, stats


def write_centrality_csv(cv: CentralityVector, labels, path) -> None:
    """``word,value`` rows sorted by value descending, then word."""
    vals = cv.values.tolist()
    order = sorted(range(len(vals)), key=lambda i: (-vals[i], labels[i]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("word", "value"))
        for i in order:
            writer.writerow((labels[i], repr(vals[i])))
