from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from txnet.models.graph import WeightedDigraph


class SamplingMethod(str, Enum):
    RWFB = "rwfb"
    RWS = "rws"
    RN = "rn"
    RE = "re"
    FF = "ff"
    SB = "sb"


class RestartPolicy(str, Enum):
    RESTART_TO_START = "restart_to_start"
    STAY_AT_CURRENT = "stay_at_current"


class SubgraphMode(str, Enum):
    INDUCED = "induced"
    TRAVERSED = "traversed"


class SamplerConfig(BaseModel):
    """Sampler selection and every tunable; serialized verbatim into run manifests."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    method: SamplingMethod = SamplingMethod.RWFB
    target_nodes: int = Field(..., gt=0)
    p: float = Field(0.3, ge=0.0, lt=1.0)
    ff_forward_prob: float = Field(0.7, gt=0.0, lt=1.0)
    sb_depth: int = Field(2, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    restart_policy: RestartPolicy = RestartPolicy.RESTART_TO_START
    subgraph_mode: SubgraphMode = SubgraphMode.INDUCED
    stall_limit: int = Field(1000, ge=1)


@dataclass(frozen=True)
class SampleResult:
    """
    Sampled subgraph plus walk bookkeeping.

    ``node_map[i]`` is the original id of subgraph node ``i``.
    ``visited_order`` lists original ids in discovery order.
    """

    subgraph: WeightedDigraph
    visited_order: Tuple[int, ...]
    node_map: np.ndarray
    restarts: int = 0
    steps_taken: int = 0
    traversed_edges: int = 0
    config: SamplerConfig | None = field(default=None, compare=False)
