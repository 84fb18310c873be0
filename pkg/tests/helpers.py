"""Random tiny instances shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from epcslice.model import (
    Endpoint,
    Slice,
    SliceEdge,
    SubstrateEdge,
    SubstrateNetwork,
    SubstrateNode,
    Vnf,
)

COMPUTE, STORAGE = "compute", "storage"


def _money(rng: random.Random, coarse: bool) -> Fraction:
    if coarse:  # few distinct prices, so cost ties are common
        return Fraction(rng.randint(0, 2), 2)
    return Fraction(rng.randint(0, 200), 100)


def random_instance(
    rng: random.Random,
    max_nodes: int = 5,
    max_vnfs: int = 4,
    max_slices: int = 2,
    coarse: bool = False,
) -> Tuple[SubstrateNetwork, List[Slice], Fraction]:
    """A small, often tight instance with decimal prices and a sparse topology."""
    n_nodes = rng.randint(2, max_nodes)
    ids = [f"n{i}" for i in range(n_nodes)]
    nodes = [
        SubstrateNode(
            nid,
            COMPUTE if rng.random() < 0.6 else STORAGE,
            rng.randint(1, 5),
            _money(rng, coarse),
        )
        for nid in ids
    ]
    edges = [
        SubstrateEdge(a, b, rng.randint(1, 4), _money(rng, coarse) / 4, rng.randint(1, 15))
        for i, a in enumerate(ids)
        for b in ids[i + 1:]
        if rng.random() < 0.75
    ]
    net = SubstrateNetwork(nodes, edges)

    n_slices = rng.randint(1, max_slices)
    if n_slices == 1:
        counts = [rng.randint(1, max_vnfs)]
    else:
        first = rng.randint(1, max_vnfs - 1)
        counts = [first, rng.randint(1, max_vnfs - first)]
    slices = [_random_slice(rng, f"s{k}", count, ids) for k, count in enumerate(counts)]
    return net, slices, Fraction(rng.randint(5, 80))


def _random_slice(rng: random.Random, sid: str, count: int, node_ids: List[str]) -> Slice:
    icn = count >= 2 and rng.random() < 0.5
    kinds = [COMPUTE] * count
    if icn:
        kinds[1] = STORAGE
        for i in range(2, count):
            kinds[i] = rng.choice((COMPUTE, STORAGE))
    vnfs = [Vnf(f"v{i}", kinds[i], 1 if rng.random() < 0.7 else 2) for i in range(count)]
    edges = [SliceEdge(f"v{i}", f"v{i + 1}", rng.randint(1, 2), "VV") for i in range(count - 1)]
    if count >= 3 and rng.random() < 0.3:
        edges.append(SliceEdge("v0", f"v{count - 1}", rng.randint(1, 2), "VV"))
    endpoints = []
    if rng.random() < 0.8:
        endpoints.append(Endpoint("u", "user", rng.choice(node_ids)))
        edges.append(SliceEdge("u", f"v{rng.randrange(count)}", rng.randint(1, 2), "UV"))
    if rng.random() < 0.7:
        endpoints.append(Endpoint("w", "surrogate", rng.choice(node_ids)))
        edges.append(SliceEdge("w", f"v{rng.randrange(count)}", rng.randint(1, 2), "VW"))
    return Slice(sid, "icn" if icn else "traditional", vnfs, endpoints, edges)


def random_placements(
    rng: random.Random, net: SubstrateNetwork, slices: List[Slice]
) -> Optional[Dict[Tuple[str, str], str]]:
    """Kind-respecting random placement, or None if some VNF has no candidate."""
    out = {}
    for s in slices:
        for v in s.vnfs:
            cands = [n.id for n in net.nodes if n.kind is v.kind]
            if not cands:
                return None
            out[(s.id, v.id)] = rng.choice(cands)
    return out


def relabel(net: SubstrateNetwork, slices: List[Slice], mapping: Dict[str, str]):
    """Rename substrate nodes (and endpoint locations) through ``mapping``."""
    nodes = [SubstrateNode(mapping[n.id], n.kind, n.capacity, n.unit_cost, n.label) for n in net.nodes]
    edges = [SubstrateEdge(mapping[e.a], mapping[e.b], e.bandwidth, e.unit_bw_cost, e.delay) for e in net.edges]
    new_slices = [
        Slice(
            s.id,
            s.kind,
            s.vnfs,
            [Endpoint(ep.id, ep.role, mapping[ep.location]) for ep in s.endpoints],
            s.edges,
            s.subslices,
        )
        for s in slices
    ]
    return SubstrateNetwork(nodes, edges), new_slices


def scale_costs(net: SubstrateNetwork, alpha: Fraction) -> SubstrateNetwork:
    nodes = [SubstrateNode(n.id, n.kind, n.capacity, n.unit_cost * alpha, n.label) for n in net.nodes]
    edges = [SubstrateEdge(e.a, e.b, e.bandwidth, e.unit_bw_cost * alpha, e.delay) for e in net.edges]
    return SubstrateNetwork(nodes, edges)
