"""Seeded random VNF placement, the comparison point for the optimum.

Generator: Python's ``random.Random`` (MT19937) seeded with the 64-bit seed.
VNFs are drawn in (slice id, VNF id) order, each with ``randrange`` over its
kind-compatible nodes sorted by id, so a seed maps to the same placement on
every platform.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple, Union

from .model import (
    CostBreakdown,
    Embedding,
    ModelError,
    Slice,
    SubstrateNetwork,
    evaluate_cost,
    validate_embedding,
)

SEED_MASK = (1 << 64) - 1


class FeasibilityMode(str, Enum):
    PAPER = "paper"  # latency and node capacity only
    FULL = "full"  # every constraint, including bandwidth and link existence


_CHECKED = {
    FeasibilityMode.PAPER: ("C1", "C2", "C10"),
    FeasibilityMode.FULL: ("C1", "C2", "C3", "C6", "C10"),
}


@dataclass(frozen=True)
class BaselineParams:
    seed: int
    max_attempts: int = 10000
    feasibility_mode: FeasibilityMode = FeasibilityMode.FULL

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")
        object.__setattr__(self, "feasibility_mode", FeasibilityMode(self.feasibility_mode))


@dataclass
class NoFeasibleSampleFound:
    seed: int
    attempts: int
    failures: Counter = field(default_factory=Counter)  # constraint family -> rejected draws

    def __str__(self):
        detail = ", ".join(f"{k}: {v}" for k, v in sorted(self.failures.items()))
        return f"no feasible sample for seed {self.seed} after {self.attempts} draws ({detail})"


def random_embedding(
    net: SubstrateNetwork, slices: Sequence[Slice], d_max, params: BaselineParams
) -> Union[Embedding, NoFeasibleSampleFound]:
    rng = random.Random(params.seed & SEED_MASK)
    order = sorted(((s, v) for s in slices for v in s.vnfs), key=lambda sv: (sv[0].id, sv[1].id))
    node_ids = net.node_ids()
    domains = [[n for n in node_ids if net.node(n).kind is v.kind] for _, v in order]
    checked = _CHECKED[params.feasibility_mode]
    failures = Counter()
    for _ in range(params.max_attempts):
        if any(not d for d in domains):
            failures["C1"] += 1
            continue
        placements = {(s.id, v.id): d[rng.randrange(len(d))] for (s, v), d in zip(order, domains)}
        emb = Embedding.from_placements(slices, placements)
        report = validate_embedding(net, slices, emb, d_max)
        bad = [fam for fam in checked if not report[fam].passed]
        if not bad:
            return emb
        failures.update(bad)
    return NoFeasibleSampleFound(params.seed, params.max_attempts, failures)


def sample_costs(
    net: SubstrateNetwork,
    slices: Sequence[Slice],
    d_max,
    seeds: Sequence[int],
    mode: FeasibilityMode = FeasibilityMode.FULL,
    max_attempts: int = 10000,
) -> List[Tuple[int, Union[CostBreakdown, NoFeasibleSampleFound]]]:
    """Cost of the random placement drawn for each seed (or the failure record)."""
    out = []
    for seed in seeds:
        got = random_embedding(net, slices, d_max, BaselineParams(seed, max_attempts, mode))
        if isinstance(got, NoFeasibleSampleFound):
            out.append((seed, got))
            continue
        try:
            out.append((seed, evaluate_cost(net, slices, got.placements)))
        except ModelError:
            # PAPER mode skips the link-existence check, so the draw may be uncostable
            out.append((seed, NoFeasibleSampleFound(seed, 1, Counter({"C6": 1}))))
    return out
