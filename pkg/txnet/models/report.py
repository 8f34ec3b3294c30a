from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from txnet import __version__

DegreeMode = Literal["in", "out", "total"]
SeriesPoints = List[Tuple[float, float]]


class DegreeDistribution(BaseModel):
    mode: DegreeMode
    support: List[int]
    pmf: List[float]
    counts: List[int]
    fitted_alpha: Optional[float] = None
    fitted_xmin: Optional[int] = None
    ks_gof: Optional[float] = None

    @property
    def node_count(self) -> int:
        return sum(self.counts)


class ReportOptions(BaseModel):
    """Knobs of a full metric report; part of the run manifest."""

    exact: Optional[bool] = None
    pivots: Optional[int] = Field(None, gt=0)
    seed: int = Field(0, ge=0)
    path_pairs: int = Field(10_000, gt=0)
    omega_replicates: int = Field(5, ge=1)
    richclub_replicates: int = Field(5, ge=0)
    richclub_attempts_per_edge: int = Field(100, ge=1)


class MetricReport(BaseModel):
    """
    Whole-graph scalars, per-node vectors and plot series.

    Undefined scalars are stored as ``None`` with a matching entry in
    ``flags`` (e.g. ``assortativity_undefined``).
    """

    node_count: int
    edge_count: int
    scalars: Dict[str, Optional[float]] = Field(default_factory=dict)
    per_node: Dict[str, List[float]] = Field(default_factory=dict)
    series: Dict[str, SeriesPoints] = Field(default_factory=dict)
    distributions: Dict[str, DegreeDistribution] = Field(default_factory=dict)
    flags: Dict[str, bool] = Field(default_factory=dict)
    notes: Dict[str, str] = Field(default_factory=dict)
    manifest: Optional["RunManifest"] = None


class FidelityScore(BaseModel):
    d_degree: float
    d_clustering: float
    d_betweenness: float
    d_closeness: float
    d_avg: float
    kernel_normalized: Optional[float] = None
    kernel_reference_cap: Optional[int] = None
    kernel_reference_seed: Optional[int] = None
    kernel_reference_subsampled: bool = False

    @classmethod
    def from_statistics(cls, d_degree: float, d_clustering: float, d_betweenness: float,
                        d_closeness: float, **kernel: Any) -> "FidelityScore":
        d_avg = (d_degree + d_clustering + d_betweenness + d_closeness) / 4.0
        return cls(
            d_degree=d_degree,
            d_clustering=d_clustering,
            d_betweenness=d_betweenness,
            d_closeness=d_closeness,
            d_avg=d_avg,
            **kernel,
        )


class RunManifest(BaseModel):
    """Everything needed to replay a command."""

    command: str
    version: str = __version__
    rng: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)


MetricReport.model_rebuild()
