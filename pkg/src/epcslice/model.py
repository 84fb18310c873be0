"""Substrate and slice types, cost evaluation and the independent validator.

Everything else in the package (ILP builder, search, random baseline) is
checked against the functions in this module, so they are written for
clarity over speed and never share code paths with the solver internals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ._numbers import to_fraction

NodeId = str
# (slice id, vnf id)
VnfKey = Tuple[str, str]
# (slice id, edge endpoint a, edge endpoint b), orientation as declared in the slice
EdgeKey = Tuple[str, str, str]


class ModelError(Exception):
    """Base class for invalid-input errors raised by the model."""


class MalformedSlice(ModelError):
    pass


class DisconnectedSlice(ModelError):
    pass


class IncompleteAssignment(ModelError):
    pass


class MissingSubstrateEdge(ModelError):
    def __init__(self, slice_id, v, v2, n, n2):
        super().__init__(
            f"slice {slice_id}: edge ({v}, {v2}) needs substrate link ({n}, {n2}) which does not exist"
        )
        self.slice_id = slice_id
        self.edge = (v, v2)
        self.link = (n, n2)


class NodeKind(str, Enum):
    COMPUTE = "compute"
    STORAGE = "storage"


class SliceKind(str, Enum):
    TRADITIONAL = "traditional"
    ICN = "icn"


class Role(str, Enum):
    USER = "user"
    SURROGATE = "surrogate"


class EdgeClass(str, Enum):
    VV = "VV"  # vnf - vnf
    UV = "UV"  # user - vnf
    VW = "VW"  # vnf - surrogate


class _Colocated:
    """Marker for a virtual edge whose two ends sit on the same substrate node."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "COLOCATED"

    def __reduce__(self):
        return (_Colocated, ())


COLOCATED = _Colocated()


# --------------------------------------------------------------------------
# substrate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SubstrateNode:
    id: NodeId
    kind: NodeKind
    capacity: Fraction
    unit_cost: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        object.__setattr__(self, "capacity", to_fraction(self.capacity))
        object.__setattr__(self, "unit_cost", to_fraction(self.unit_cost))


@dataclass(frozen=True)
class SubstrateEdge:
    a: NodeId
    b: NodeId
    bandwidth: Fraction
    unit_bw_cost: Fraction
    delay: Fraction

    def __post_init__(self):
        for name in ("bandwidth", "unit_bw_cost", "delay"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))

    @property
    def key(self) -> frozenset:
        return frozenset((self.a, self.b))

    def other(self, n: NodeId) -> NodeId:
        return self.b if n == self.a else self.a


@dataclass(frozen=True)
class SubstrateNetwork:
    """Undirected capacitated graph of compute and storage nodes.

    Construction never raises on structural problems; use
    :func:`validate_substrate` to list them.
    """

    nodes: Tuple[SubstrateNode, ...]
    edges: Tuple[SubstrateEdge, ...]
    _node_by_id: Dict[NodeId, SubstrateNode] = field(init=False, repr=False, compare=False)
    _edge_by_pair: Dict[frozenset, SubstrateEdge] = field(init=False, repr=False, compare=False)
    _adj: Dict[NodeId, Tuple[NodeId, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        by_id = {}
        for n in self.nodes:
            by_id.setdefault(n.id, n)
        pairs = {}
        adj: Dict[NodeId, set] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            pairs.setdefault(e.key, e)
            if e.a != e.b:
                adj.setdefault(e.a, set()).add(e.b)
                adj.setdefault(e.b, set()).add(e.a)
        object.__setattr__(self, "_node_by_id", by_id)
        object.__setattr__(self, "_edge_by_pair", pairs)
        object.__setattr__(self, "_adj", {k: tuple(sorted(v)) for k, v in adj.items()})

    def node(self, node_id: NodeId) -> SubstrateNode:
        return self._node_by_id[node_id]

    def has_node(self, node_id: NodeId) -> bool:
        return node_id in self._node_by_id

    def edge(self, n: NodeId, n2: NodeId) -> Optional[SubstrateEdge]:
        """The edge joining ``n`` and ``n2`` in either orientation, or None."""
        if n == n2:
            return None
        return self._edge_by_pair.get(frozenset((n, n2)))

    def neighbors(self, n: NodeId) -> Tuple[NodeId, ...]:
        return self._adj.get(n, ())

    def node_ids(self) -> List[NodeId]:
        return sorted(self._node_by_id)

    def sorted_edges(self) -> List[SubstrateEdge]:
        return sorted(self._edge_by_pair.values(), key=lambda e: tuple(sorted((e.a, e.b))))


# --------------------------------------------------------------------------
# slices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Vnf:
    id: str
    kind: NodeKind
    demand: Fraction

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        object.__setattr__(self, "demand", to_fraction(self.demand))


@dataclass(frozen=True)
class Endpoint:
    id: str
    role: Role
    location: NodeId

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))


@dataclass(frozen=True)
class SliceEdge:
    a: str
    b: str
    bandwidth_demand: Fraction
    cls: EdgeClass

    def __post_init__(self):
        object.__setattr__(self, "bandwidth_demand", to_fraction(self.bandwidth_demand))
        object.__setattr__(self, "cls", EdgeClass(self.cls))


@dataclass(frozen=True)
class SubSlice:
    slice_id: str
    source: str
    edges: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))


@dataclass(frozen=True)
class Slice:
    id: str
    kind: SliceKind
    vnfs: Tuple[Vnf, ...]
    endpoints: Tuple[Endpoint, ...] = ()
    edges: Tuple[SliceEdge, ...] = ()
    subslices: Optional[Tuple[SubSlice, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SliceKind(self.kind))
        object.__setattr__(self, "vnfs", tuple(self.vnfs))
        object.__setattr__(self, "endpoints", tuple(self.endpoints))
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.subslices is not None:
            object.__setattr__(self, "subslices", tuple(self.subslices))

    def vnf(self, vnf_id: str) -> Vnf:
        for v in self.vnfs:
            if v.id == vnf_id:
                return v
        raise KeyError(vnf_id)

    def endpoint(self, ep_id: str) -> Optional[Endpoint]:
        for ep in self.endpoints:
            if ep.id == ep_id:
                return ep
        return None

    def users(self) -> List[Endpoint]:
        return [ep for ep in self.endpoints if ep.role is Role.USER]

    def surrogates(self) -> List[Endpoint]:
        return [ep for ep in self.endpoints if ep.role is Role.SURROGATE]


@dataclass(frozen=True)
class SliceGraph:
    """H_s with the edge partition and undirected adjacency."""

    slice_id: str
    vnf_ids: Tuple[str, ...]
    user_ids: Tuple[str, ...]
    surrogate_ids: Tuple[str, ...]
    vv: Tuple[SliceEdge, ...]
    uv: Tuple[SliceEdge, ...]
    vw: Tuple[SliceEdge, ...]
    adjacency: Mapping[str, Tuple[str, ...]]

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self.vnf_ids + self.user_ids + self.surrogate_ids

    def neighbors(self, node: str) -> Tuple[str, ...]:
        return self.adjacency.get(node, ())


def slice_problems(s: Slice) -> List[str]:
    """Human-readable list of slice invariant violations (empty if valid)."""
    problems = []
    ids = [v.id for v in s.vnfs] + [ep.id for ep in s.endpoints]
    seen = set()
    for i in ids:
        if i in seen:
            problems.append(f"slice {s.id}: duplicate node id {i!r}")
        seen.add(i)
    for v in s.vnfs:
        if v.demand < 0:
            problems.append(f"slice {s.id}: vnf {v.id} has negative demand")
    kinds = {v.kind for v in s.vnfs}
    if s.kind is SliceKind.TRADITIONAL and NodeKind.STORAGE in kinds:
        problems.append(f"slice {s.id}: traditional slices contain only compute VNFs")
    if s.kind is SliceKind.ICN and kinds != {NodeKind.COMPUTE, NodeKind.STORAGE}:
        problems.append(f"slice {s.id}: ICN slices need both compute and storage VNFs")
    vnf_ids = {v.id for v in s.vnfs}
    roles = {ep.id: ep.role for ep in s.endpoints}
    pairs = set()
    for e in s.edges:
        where = f"slice {s.id}: edge ({e.a}, {e.b})"
        if e.a not in seen or e.b not in seen:
            problems.append(f"{where} references an unknown node")
            continue
        if e.a == e.b:
            problems.append(f"{where} is a self-loop")
        pair = frozenset((e.a, e.b))
        if pair in pairs:
            problems.append(f"{where} is duplicated")
        pairs.add(pair)
        if e.bandwidth_demand < 0:
            problems.append(f"{where} has negative bandwidth demand")
        end_roles = sorted(
            "vnf" if x in vnf_ids else roles[x].value for x in (e.a, e.b)
        )
        expected = {
            EdgeClass.VV: ["vnf", "vnf"],
            EdgeClass.UV: ["user", "vnf"],
            EdgeClass.VW: ["surrogate", "vnf"],
        }[e.cls]
        if end_roles != expected:
            problems.append(f"{where} has class {e.cls.value} but joins {end_roles}")
    return problems


def build_slice_graph(s: Slice) -> SliceGraph:
    problems = slice_problems(s)
    if problems:
        raise MalformedSlice("; ".join(problems))
    adj: Dict[str, set] = {x: set() for x in [v.id for v in s.vnfs] + [ep.id for ep in s.endpoints]}
    for e in s.edges:
        adj[e.a].add(e.b)
        adj[e.b].add(e.a)
    return SliceGraph(
        slice_id=s.id,
        vnf_ids=tuple(v.id for v in s.vnfs),
        user_ids=tuple(ep.id for ep in s.users()),
        surrogate_ids=tuple(ep.id for ep in s.surrogates()),
        vv=tuple(e for e in s.edges if e.cls is EdgeClass.VV),
        uv=tuple(e for e in s.edges if e.cls is EdgeClass.UV),
        vw=tuple(e for e in s.edges if e.cls is EdgeClass.VW),
        adjacency={k: tuple(sorted(v)) for k, v in adj.items()},
    )


def _bfs(graph: SliceGraph, start: str) -> Dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in graph.neighbors(cur):
            if nb not in dist:
                dist[nb] = dist[cur] + 1
                queue.append(nb)
    return dist


def _lex_shortest_path(graph: SliceGraph, src: str, dst: str, from_src, to_dst) -> List[str]:
    path = [src]
    cur = src
    while cur != dst:
        cur = min(
            nb
            for nb in graph.neighbors(cur)
            if nb in from_src
            and nb in to_dst
            and from_src[nb] == from_src[cur] + 1
            and from_src[nb] + to_dst[nb] == from_src[dst]
        )
        path.append(cur)
    return path


def _edge_lookup(s: Slice) -> Dict[frozenset, Tuple[str, str]]:
    return {frozenset((e.a, e.b)): (e.a, e.b) for e in s.edges}


def check_subslice(s: Slice, sub: SubSlice) -> None:
    """Raise MalformedSlice unless ``sub`` is a valid sub-slice of ``s``."""
    declared = {(e.a, e.b) for e in s.edges}
    if sub.slice_id != s.id:
        raise MalformedSlice(f"sub-slice of {sub.slice_id!r} attached to slice {s.id!r}")
    for edge in sub.edges:
        if edge not in declared:
            raise MalformedSlice(f"slice {s.id}: sub-slice edge {edge} is not a slice edge")
    reach = {sub.source}
    changed = True
    while changed:
        changed = False
        for a, b in sub.edges:
            if (a in reach) != (b in reach):
                reach.update((a, b))
                changed = True
    if not any(u.id in reach for u in s.users()):
        raise MalformedSlice(f"slice {s.id}: sub-slice from {sub.source} reaches no user")


def derive_subslices(s: Slice) -> List[SubSlice]:
    """Latency sub-slices of ``s``.

    Explicit sub-slices are validated and returned as given. Otherwise one
    sub-slice per content source (storage VNFs and surrogates for ICN slices,
    surrogates only for traditional ones), each the union of lexicographically
    smallest minimum-hop paths from the source to every user.
    """
    if s.subslices is not None:
        for sub in s.subslices:
            check_subslice(s, sub)
        return list(s.subslices)
    graph = build_slice_graph(s)
    users = sorted(graph.user_ids)
    if not users:
        return []
    if s.kind is SliceKind.ICN:
        sources = [v.id for v in s.vnfs if v.kind is NodeKind.STORAGE]
    else:
        sources = []
    sources += [ep.id for ep in s.surrogates()]
    lookup = _edge_lookup(s)
    to_user = {u: _bfs(graph, u) for u in users}
    result = []
    for src in sources:
        from_src = _bfs(graph, src)
        chosen = []
        for u in users:
            if u not in from_src:
                raise DisconnectedSlice(f"slice {s.id}: user {u} unreachable from {src}")
            path = _lex_shortest_path(graph, src, u, from_src, to_user[u])
            for x, y in zip(path, path[1:]):
                edge = lookup[frozenset((x, y))]
                if edge not in chosen:
                    chosen.append(edge)
        order = {(e.a, e.b): i for i, e in enumerate(s.edges)}
        chosen.sort(key=order.__getitem__)
        result.append(SubSlice(s.id, src, tuple(chosen)))
    return result


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, code: str, message: str) -> None:
        self.findings.append(Finding(code, message))

    def codes(self) -> List[str]:
        return [f.code for f in self.findings]

    def __str__(self):
        if self.ok:
            return "OK"
        return "\n".join(f"[{f.code}] {f.message}" for f in self.findings)


def validate_substrate(net: SubstrateNetwork) -> ValidationReport:
    report = ValidationReport()
    seen = set()
    for n in net.nodes:
        if n.id in seen:
            report.add("duplicate-node", f"node id {n.id!r} appears more than once")
        seen.add(n.id)
        if n.capacity < 0:
            report.add("negative-capacity", f"node {n.id} has capacity {n.capacity}")
        if n.unit_cost < 0:
            report.add("negative-cost", f"node {n.id} has unit cost {n.unit_cost}")
    pairs = set()
    for e in net.edges:
        where = f"edge ({e.a}, {e.b})"
        for end in (e.a, e.b):
            if end not in seen:
                report.add("dangling-endpoint", f"{where} references unknown node {end!r}")
        if e.a == e.b:
            report.add("self-loop", f"{where} is a self-loop")
        if e.key in pairs:
            report.add("duplicate-edge", f"{where} duplicates an existing node pair")
        pairs.add(e.key)
        for name in ("bandwidth", "unit_bw_cost", "delay"):
            if getattr(e, name) < 0:
                report.add(f"negative-{name.replace('_', '-')}", f"{where} has negative {name}")
    return report


def validate_problem(net: SubstrateNetwork, slices: Sequence[Slice]) -> ValidationReport:
    """Substrate checks plus slice invariants and endpoint locations."""
    report = validate_substrate(net)
    seen = set()
    for s in slices:
        if s.id in seen:
            report.add("duplicate-slice", f"slice id {s.id!r} appears more than once")
        seen.add(s.id)
        for problem in slice_problems(s):
            report.add("malformed-slice", problem)
        for ep in s.endpoints:
            if not net.has_node(ep.location):
                report.add(
                    "unknown-location",
                    f"slice {s.id}: endpoint {ep.id} located at unknown node {ep.location!r}",
                )
        try:
            derive_subslices(s)
        except ModelError as exc:
            report.add("subslice", str(exc))
    return report


# --------------------------------------------------------------------------
# embedding and costs
# --------------------------------------------------------------------------


def host_of(s: Slice, member: str, placements: Mapping[VnfKey, NodeId]) -> NodeId:
    """Substrate node of a slice member: placement for VNFs, location for endpoints."""
    ep = s.endpoint(member)
    if ep is not None:
        return ep.location
    try:
        return placements[(s.id, member)]
    except KeyError:
        raise IncompleteAssignment(f"vnf {member} of slice {s.id} is not placed") from None


def induce_links(slices: Sequence[Slice], placements: Mapping[VnfKey, NodeId]) -> Dict[EdgeKey, object]:
    """Map every virtual edge to its ordered substrate node pair, or COLOCATED."""
    links = {}
    for s in slices:
        for e in s.edges:
            n, n2 = host_of(s, e.a, placements), host_of(s, e.b, placements)
            links[(s.id, e.a, e.b)] = COLOCATED if n == n2 else (n, n2)
    return links


@dataclass(frozen=True)
class Embedding:
    placements: Mapping[VnfKey, NodeId]
    induced_links: Mapping[EdgeKey, object]

    @classmethod
    def from_placements(cls, slices: Sequence[Slice], placements: Mapping[VnfKey, NodeId]) -> "Embedding":
        placements = dict(placements)
        return cls(placements, induce_links(slices, placements))


def _check_complete(net: SubstrateNetwork, slices: Sequence[Slice], placements) -> None:
    for s in slices:
        for v in s.vnfs:
            node_id = placements.get((s.id, v.id))
            if node_id is None:
                raise IncompleteAssignment(f"vnf {v.id} of slice {s.id} is not placed")
            if not net.has_node(node_id):
                raise IncompleteAssignment(f"vnf {v.id} of slice {s.id} placed on unknown node {node_id!r}")
            if net.node(node_id).kind is not v.kind:
                raise IncompleteAssignment(
                    f"vnf {v.id} of slice {s.id} ({v.kind.value}) placed on {net.node(node_id).kind.value} node {node_id}"
                )


def _slice_deployment(net, s: Slice, placements) -> Fraction:
    return sum(
        (net.node(placements[(s.id, v.id)]).unit_cost * v.demand for v in s.vnfs),
        Fraction(0),
    )


def _slice_communication(net, s: Slice, placements) -> Fraction:
    total = Fraction(0)
    for e in s.edges:
        n, n2 = host_of(s, e.a, placements), host_of(s, e.b, placements)
        if n == n2:
            continue
        link = net.edge(n, n2)
        if link is None:
            raise MissingSubstrateEdge(s.id, e.a, e.b, n, n2)
        total += link.unit_bw_cost * e.bandwidth_demand
    return total


def deployment_cost(net: SubstrateNetwork, slices: Sequence[Slice], placements) -> Fraction:
    _check_complete(net, slices, placements)
    return sum((_slice_deployment(net, s, placements) for s in slices), Fraction(0))


def communication_cost(net: SubstrateNetwork, slices: Sequence[Slice], placements) -> Fraction:
    _check_complete(net, slices, placements)
    return sum((_slice_communication(net, s, placements) for s in slices), Fraction(0))


@dataclass(frozen=True)
class CostBreakdown:
    deployment: Fraction
    communication: Fraction
    total: Fraction
    per_slice: Mapping[str, Tuple[Fraction, Fraction]]


def evaluate_cost(net: SubstrateNetwork, slices: Sequence[Slice], placements) -> CostBreakdown:
    _check_complete(net, slices, placements)
    per_slice = {
        s.id: (_slice_deployment(net, s, placements), _slice_communication(net, s, placements))
        for s in slices
    }
    dep = sum((d for d, _ in per_slice.values()), Fraction(0))
    com = sum((c for _, c in per_slice.values()), Fraction(0))
    return CostBreakdown(dep, com, dep + com, per_slice)


# --------------------------------------------------------------------------
# constraint validation
# --------------------------------------------------------------------------

FAMILIES = ("C1", "C2", "C3", "C6", "C10")

FAMILY_TITLES = {
    "C1": "each VNF on exactly one kind-matching node",
    "C2": "node capacity",
    "C3": "link bandwidth capacity",
    "C6": "induced links follow placements and exist in the substrate",
    "C10": "sub-slice latency bound",
}


@dataclass
class FamilyResult:
    family: str
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class ConstraintReport:
    results: Dict[str, FamilyResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failed(self) -> List[str]:
        return [f for f, r in self.results.items() if not r.passed]

    def __getitem__(self, family: str) -> FamilyResult:
        return self.results[family]

    def __str__(self):
        lines = []
        for fam, res in self.results.items():
            status = "pass" if res.passed else "FAIL"
            lines.append(f"{fam:<4} {status}  {FAMILY_TITLES[fam]}")
            lines.extend(f"       - {v}" for v in res.violations)
        return "\n".join(lines)


def validate_embedding(
    net: SubstrateNetwork, slices: Sequence[Slice], emb: Embedding, d_max
) -> ConstraintReport:
    """Check an embedding against placement, capacity, bandwidth and latency rules."""
    d_max = to_fraction(d_max)
    results = {fam: FamilyResult(fam) for fam in FAMILIES}
    c1, c2, c3, c6, c10 = (results[f].violations for f in FAMILIES)

    known = {(s.id, v.id) for s in slices for v in s.vnfs}
    for key in emb.placements:
        if key not in known:
            c1.append(f"placement for unknown vnf {key}")
    load: Dict[NodeId, Fraction] = {}
    placed_ok = True
    for s in slices:
        for v in s.vnfs:
            node_id = emb.placements.get((s.id, v.id))
            if node_id is None:
                c1.append(f"{s.id}/{v.id} is not placed")
                placed_ok = False
                continue
            if not net.has_node(node_id):
                c1.append(f"{s.id}/{v.id} placed on unknown node {node_id!r}")
                placed_ok = False
                continue
            if net.node(node_id).kind is not v.kind:
                c1.append(f"{s.id}/{v.id} is {v.kind.value} but node {node_id} is {net.node(node_id).kind.value}")
            load[node_id] = load.get(node_id, Fraction(0)) + v.demand

    for node_id in sorted(load):
        cap = net.node(node_id).capacity
        if load[node_id] > cap:
            c2.append(f"node {node_id}: load {load[node_id]} > capacity {cap}")

    if not placed_ok:
        c6.append("cannot induce links from an incomplete placement")
        return ConstraintReport(results)

    expected = induce_links(slices, emb.placements)
    if set(emb.induced_links) != set(expected):
        c6.append("induced link map does not cover exactly the slice edges")
    for key, target in expected.items():
        if key in emb.induced_links and emb.induced_links[key] != target:
            c6.append(f"edge {key} recorded on {emb.induced_links[key]} but placements give {target}")

    usage: Dict[frozenset, Fraction] = {}
    edge_delay: Dict[Tuple[str, str], Fraction] = {}
    for s in slices:
        for e in s.edges:
            target = expected[(s.id, e.a, e.b)]
            if target is COLOCATED:
                edge_delay[(s.id, e.a, e.b)] = Fraction(0)
                continue
            link = net.edge(*target)
            if link is None:
                c6.append(f"{s.id}: edge ({e.a}, {e.b}) needs missing substrate link {target}")
                continue
            usage[link.key] = usage.get(link.key, Fraction(0)) + e.bandwidth_demand
            edge_delay[(s.id, e.a, e.b)] = link.delay * e.bandwidth_demand

    for link in net.sorted_edges():
        used = usage.get(link.key, Fraction(0))
        if used > link.bandwidth:
            c3.append(f"link ({link.a}, {link.b}): load {used} > bandwidth {link.bandwidth}")

    for s in slices:
        for sub in derive_subslices(s):
            latency = sum(
                (edge_delay.get((s.id, a, b), Fraction(0)) for a, b in sub.edges), Fraction(0)
            )
            if latency > d_max:
                c10.append(f"{s.id}: sub-slice from {sub.source} has latency {latency} > {d_max}")
    return ConstraintReport(results)
