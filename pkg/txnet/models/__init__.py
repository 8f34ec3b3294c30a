from txnet.models.graph import NodeId, WeightedDigraph, WeightedEdge
from txnet.models.report import DegreeDistribution, FidelityScore, MetricReport, ReportOptions, RunManifest
from txnet.models.sampling import RestartPolicy, SampleResult, SamplerConfig, SamplingMethod, SubgraphMode
from txnet.models.transaction import IngestStats, TransactionRecord

__all__ = [
    "NodeId",
    "WeightedDigraph",
    "WeightedEdge",
    "TransactionRecord",
    "IngestStats",
    "SamplerConfig",
    "SamplingMethod",
    "RestartPolicy",
    "SubgraphMode",
    "SampleResult",
    "DegreeDistribution",
    "MetricReport",
    "ReportOptions",
    "FidelityScore",
    "RunManifest",
]
