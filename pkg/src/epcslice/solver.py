"""Exact depth-first branch-and-bound over VNF-to-node assignments.

All money, capacity, bandwidth and delay quantities are rescaled to Python
integers once per solve (one common denominator per quantity family), so
the search itself is exact and fast. Results are converted back to
fractions and re-costed through :mod:`epcslice.model` before they are
returned.

Tie-break: among equal-cost optima the solver returns the assignment whose
node-id sequence is lexicographically smallest when VNFs are listed by
(slice id, VNF id). :func:`brute_force` applies the same rule.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ._numbers import common_denominator, to_fraction
from .model import (
    CostBreakdown,
    EdgeClass,
    Embedding,
    ModelError,
    Slice,
    SubstrateNetwork,
    ValidationReport,
    derive_subslices,
    evaluate_cost,
    validate_embedding,
    validate_problem,
)

TIE_BREAK = "lexicographic node ids, VNFs ordered by (slice id, VNF id)"


class InvalidInput(ModelError):
    pass


class InstanceTooLarge(ModelError):
    pass


class Status(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE_WITH_GAP = "feasible_with_gap"
    INFEASIBLE = "infeasible"
    NO_SOLUTION_WITHIN_LIMIT = "no_solution_within_limit"


@dataclass(frozen=True)
class SolveParams:
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    thread_count: int = 1

    def __post_init__(self):
        if self.thread_count < 1:
            raise ValueError("thread_count must be positive")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")
        if self.node_limit is not None and self.node_limit < 0:
            raise ValueError("node_limit must be nonnegative")


@dataclass
class SolveStats:
    nodes: int = 0
    pruned: int = 0
    seconds: float = 0.0
    incumbents: List[Tuple[Fraction, Fraction]] = field(default_factory=list)  # (cost, lower bound)


@dataclass
class SolveResult:
    status: Status
    embedding: Optional[Embedding]
    cost: Optional[CostBreakdown]
    lower_bound: Fraction
    gap: Optional[Fraction]
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def has_solution(self) -> bool:
        return self.embedding is not None


def _gap(cost: Fraction, bound: Fraction) -> Fraction:
    if cost <= 0:
        return Fraction(0)
    return max(Fraction(0), (cost - bound) / cost)


def _vnf_order(slices: Sequence[Slice]):
    pairs = [(s, v) for s in slices for v in s.vnfs]
    pairs.sort(key=lambda sv: (sv[0].id, sv[1].id))
    return pairs


def _check_input(net, slices):
    report = validate_problem(net, slices)
    if not report.ok:
        raise InvalidInput(str(report))


class _Search:
    """Integer-scaled search state. Node and VNF indices follow sorted-id order."""

    def __init__(self, net: SubstrateNetwork, slices: Sequence[Slice], d_max):
        self.net = net
        self.slices = list(slices)
        self.order = _vnf_order(slices)
        self.node_ids = net.node_ids()
        nidx = {n: i for i, n in enumerate(self.node_ids)}
        vidx = {(s.id, v.id): i for i, (s, v) in enumerate(self.order)}
        self.vidx = vidx
        V, N = len(self.order), len(self.node_ids)
        nodes = [net.node(n) for n in self.node_ids]
        links = net.sorted_edges()
        self.links = links

        # virtual edges: (i, j) for VV, (i, loc) for fixed
        vedges = []
        for s in slices:
            for e in s.edges:
                if e.cls is EdgeClass.VV:
                    vedges.append((vidx[(s.id, e.a)], vidx[(s.id, e.b)], None, e))
                else:
                    vnf, fixed = (e.b, e.a) if s.endpoint(e.a) is not None else (e.a, e.b)
                    vedges.append((vidx[(s.id, vnf)], None, nidx[s.endpoint(fixed).location], e))
        edge_index = {}
        for k, (_, _, _, e) in enumerate(vedges):
            edge_index[id(e)] = k

        # scales
        dem_scale = common_denominator([v.demand for _, v in self.order] + [n.capacity for n in nodes])
        bw_scale = common_denominator([e.bandwidth_demand for *_, e in vedges] + [l.bandwidth for l in links])
        cost_scale = common_denominator(
            [n.unit_cost / dem_scale for n in nodes]
            + [l.unit_bw_cost * e.bandwidth_demand for l in links for *_, e in vedges]
        )
        d_max = to_fraction(d_max)
        delay_scale = common_denominator(
            [d_max] + [l.delay * e.bandwidth_demand for l in links for *_, e in vedges]
        )
        self.cost_scale = cost_scale

        self.demand = [int(v.demand * dem_scale) for _, v in self.order]
        self.cap = [int(n.capacity * dem_scale) for n in nodes]
        self.price = [int(n.unit_cost * cost_scale / dem_scale) for n in nodes]
        self.kind = [n.kind for n in nodes]
        self.vkind = [v.kind for _, v in self.order]
        self.link_at = [[-1] * N for _ in range(N)]
        for li, l in enumerate(links):
            a, b = nidx[l.a], nidx[l.b]
            self.link_at[a][b] = self.link_at[b][a] = li
        self.bw = [int(l.bandwidth * bw_scale) for l in links]
        self.d_max = int(d_max * delay_scale)

        E = len(vedges)
        self.e_i = [ve[0] for ve in vedges]
        self.e_j = [ve[1] for ve in vedges]
        self.e_loc = [ve[2] for ve in vedges]
        self.e_bw = [int(ve[3].bandwidth_demand * bw_scale) for ve in vedges]
        self.e_cost = [[int(l.unit_bw_cost * ve[3].bandwidth_demand * cost_scale) for l in links] for ve in vedges]
        self.e_delay = [[int(l.delay * ve[3].bandwidth_demand * delay_scale) for l in links] for ve in vedges]

        # sub-slices: edge index lists, and per-edge membership
        subs = []
        for s in slices:
            by_pair = {(e.a, e.b): e for e in s.edges}
            for sub in derive_subslices(s):
                subs.append([edge_index[id(by_pair[p])] for p in sub.edges])
        self.subs = subs
        self.e_subs = [[] for _ in range(E)]
        for si, members in enumerate(subs):
            for k in members:
                self.e_subs[k].append(si)

        self.v_edges = [[] for _ in range(V)]
        for k in range(E):
            self.v_edges[self.e_i[k]].append(k)
            if self.e_j[k] is not None:
                self.v_edges[self.e_j[k]].append(k)

        self.cand0 = [
            [n for n in range(N) if self.kind[n] is self.vkind[v] and self.cap[n] >= self.demand[v]]
            for v in range(V)
        ]
        self.dep = [[self.price[n] * self.demand[v] for n in range(N)] for v in range(V)]
        # cheapest link any VV edge could use between two same-kind nodes
        self.vv_cut_min = []
        for k in range(E):
            if self.e_j[k] is None:
                self.vv_cut_min.append(None)
                continue
            ki, kj = self.vkind[self.e_i[k]], self.vkind[self.e_j[k]]
            best = None
            for li, l in enumerate(links):
                a, b = nidx[l.a], nidx[l.b]
                if (self.kind[a] is ki and self.kind[b] is kj) or (self.kind[b] is ki and self.kind[a] is kj):
                    c = self.e_cost[k][li]
                    best = c if best is None else min(best, c)
            self.vv_cut_min.append(best)

        self.V, self.N, self.E = V, N, E
        self.assign = [-1] * V
        self.cap_left = list(self.cap)
        self.bw_left = list(self.bw)
        self.lat = [0] * len(subs)
        self.cost = 0

    # ---------------------------------------------------------------- moves

    def _other_host(self, k, v):
        """Substrate node at the other end of edge k seen from VNF v (-1 if unassigned)."""
        if self.e_j[k] is None:
            return self.e_loc[k]
        u = self.e_j[k] if self.e_i[k] == v else self.e_i[k]
        return self.assign[u]

    def _active(self, v):
        """(edge, host of the other end) for every edge of v whose other end is fixed."""
        out = []
        for k in self.v_edges[v]:
            m = self._other_host(k, v)
            if m >= 0:
                out.append((k, m))
        return out

    def evaluate(self, v, n, active=None):
        """Incremental cost of putting v on n, or None if it breaks a constraint."""
        if self.cap_left[n] < self.demand[v]:
            return None
        inc = self.dep[v][n]
        if active is None:
            active = self._active(v)
        need = None
        lat_add = None
        for k, m in active:
            if m == n:
                continue
            li = self.link_at[n][m]
            if li < 0:
                return None
            if need is None:
                need = {}
            need[li] = need.get(li, 0) + self.e_bw[k]
            if need[li] > self.bw_left[li]:
                return None
            inc += self.e_cost[k][li]
            dl = self.e_delay[k][li]
            if dl:
                for si in self.e_subs[k]:
                    if lat_add is None:
                        lat_add = {}
                    lat_add[si] = lat_add.get(si, 0) + dl
                    if self.lat[si] + lat_add[si] > self.d_max:
                        return None
        return inc

    def apply(self, v, n):
        self.assign[v] = n
        self.cap_left[n] -= self.demand[v]
        self.cost += self.dep[v][n]
        for k in self.v_edges[v]:
            m = self._other_host(k, v)
            if m < 0 or m == n:
                continue
            li = self.link_at[n][m]
            self.bw_left[li] -= self.e_bw[k]
            self.cost += self.e_cost[k][li]
            dl = self.e_delay[k][li]
            for si in self.e_subs[k]:
                self.lat[si] += dl

    def undo(self, v):
        n = self.assign[v]
        for k in self.v_edges[v]:
            m = self._other_host(k, v)
            if m < 0 or m == n:
                continue
            li = self.link_at[n][m]
            self.bw_left[li] += self.e_bw[k]
            self.cost -= self.e_cost[k][li]
            dl = self.e_delay[k][li]
            for si in self.e_subs[k]:
                self.lat[si] -= dl
        self.cost -= self.dep[v][n]
        self.cap_left[n] += self.demand[v]
        self.assign[v] = -1

    # ---------------------------------------------------------------- bound

    def candidates(self, v):
        active = self._active(v)
        if not active:
            dem, cap_left, dep = self.demand[v], self.cap_left, self.dep[v]
            return [(dep[n], n) for n in self.cand0[v] if cap_left[n] >= dem]
        out = []
        for n in self.cand0[v]:
            inc = self.evaluate(v, n, active)
            if inc is not None:
                out.append((inc, n))
        return out

    def bound(self):
        """(lower bound on any completion, {v: candidate list}) or (None, None) if dead."""
        assign = self.assign
        cands = {}
        per_vnf = 0
        per_vnf_comm = 0
        for v in range(self.V):
            if assign[v] >= 0:
                continue
            c = self.candidates(v)
            if not c:
                return None, None
            cands[v] = c
            per_vnf += min(inc for inc, _ in c)
            per_vnf_comm += min(inc - self.dep[v][n] for inc, n in c)

        # fractional fill of remaining demand into the cheapest remaining capacity
        fill = 0
        need_by_kind = {}
        for v in cands:
            need_by_kind[self.vkind[v]] = need_by_kind.get(self.vkind[v], 0) + self.demand[v]
        for kind, need in need_by_kind.items():
            for n in sorted(
                (n for n in range(self.N) if self.kind[n] is kind and self.cap_left[n] > 0),
                key=lambda n: self.price[n],
            ):
                take = min(need, self.cap_left[n])
                fill += take * self.price[n]
                need -= take
                if not need:
                    break
            if need:
                return None, None
        vnf_part = max(per_vnf, fill + per_vnf_comm)

        # edges with both ends open, grouped into components
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        open_edges = []
        for k in range(self.E):
            j = self.e_j[k]
            if j is None:
                continue
            i = self.e_i[k]
            if assign[i] >= 0 or assign[j] >= 0:
                continue
            open_edges.append(k)
            parent.setdefault(i, i)
            parent.setdefault(j, j)
        comp_edges: Dict[int, List[int]] = {}
        edge_part = 0
        for k in open_edges:
            i, j = self.e_i[k], self.e_j[k]
            if self.vkind[i] is not self.vkind[j]:
                if self.vv_cut_min[k] is None:
                    return None, None
                edge_part += self.vv_cut_min[k]
                continue
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
        for k in open_edges:
            i, j = self.e_i[k], self.e_j[k]
            if self.vkind[i] is self.vkind[j]:
                comp_edges.setdefault(find(i), []).append(k)
        for root, edges in comp_edges.items():
            members = {self.e_i[k] for k in edges} | {self.e_j[k] for k in edges}
            need = sum(self.demand[v] for v in members)
            pool = set()
            for v in members:
                pool.update(n for _, n in cands[v])
            caps = sorted((self.cap_left[n] for n in pool), reverse=True)
            parts, acc = 0, 0
            for c in caps:
                if acc >= need:
                    break
                acc += c
                parts += 1
            if acc < need:
                return None, None
            if parts > 1:
                mins = sorted(self.vv_cut_min[k] for k in edges if self.vv_cut_min[k] is not None)
                if len(mins) < parts - 1:
                    return None, None
                edge_part += sum(mins[: parts - 1])
        return self.cost + vnf_part + edge_part, cands


def _lex_smaller_possible(assign, incumbent, cands=None) -> bool:
    """Could some completion of ``assign`` precede ``incumbent`` in tie-break order?

    With ``cands`` (open VNF -> feasible (cost, node) list) open positions are
    checked against their actual candidates; without it they are assumed free.
    """
    for i, (a, b) in enumerate(zip(assign, incumbent)):
        if a < 0:
            if cands is None:
                return True
            nodes = [n for _, n in cands[i]]
            if min(nodes) < b:
                return True
            if b not in nodes:
                return False
            continue
        if a != b:
            return a < b
    return False


def _placements_from(search: _Search, assign) -> Dict[Tuple[str, str], str]:
    return {(s.id, v.id): search.node_ids[n] for (s, v), n in zip(search.order, assign)}


def solve_exact(net: SubstrateNetwork, slices: Sequence[Slice], d_max, params: SolveParams = SolveParams()) -> SolveResult:
    """Minimum-cost embedding by depth-first branch-and-bound.

    Branches on the open VNF with the fewest feasible nodes; children are
    visited cheapest incremental cost first. A subtree is cut when its bound
    exceeds the incumbent, or equals it and cannot hold a tie-break-smaller
    assignment.
    """
    _check_input(net, slices)
    start = time.perf_counter()
    deadline = None if params.time_limit is None else start + params.time_limit
    search = _Search(net, slices, d_max)
    stats = SolveStats()
    scale = search.cost_scale

    best_cost: Optional[int] = None
    best_assign: Optional[List[int]] = None
    reported_lb = Fraction(0)
    interrupted = False

    root_bound, root_cands = search.bound()
    # frames: [vnf, children [(bound, node)], next child index, node bound, applied node]
    stack = []
    if root_bound is not None:
        reported_lb = Fraction(root_bound, scale)
        if not root_cands:
            best_cost, best_assign = search.cost, list(search.assign)
        else:
            stack.append(_expand(search, root_cands, root_bound, stats))

    def global_lb():
        lows = []
        for frame in stack:
            lows.extend(b for b, _ in frame[1][frame[2]:])
        if best_cost is not None:
            lows.append(best_cost)
        return Fraction(min(lows), scale) if lows else Fraction(0)

    ticks = 0
    while stack:
        ticks += 1
        if ticks & 63 == 0 and deadline is not None and time.perf_counter() > deadline:
            interrupted = True
            break
        if params.node_limit is not None and stats.nodes >= params.node_limit:
            interrupted = True
            break
        frame = stack[-1]
        v, children, idx = frame[0], frame[1], frame[2]
        if frame[4] is not None:
            search.undo(v)
            frame[4] = None
        if idx >= len(children):
            stack.pop()
            continue
        frame[2] += 1
        child_bound, n = children[idx]
        if best_cost is not None and (
            child_bound > best_cost
            or (child_bound == best_cost and not _lex_smaller_possible(_peek(search, v, n), best_assign))
        ):
            stats.pruned += 1
            continue
        search.apply(v, n)
        frame[4] = n
        stats.nodes += 1
        bound, cands = search.bound()
        if bound is None:
            stats.pruned += 1
            continue
        bound = max(bound, child_bound)
        if not cands:
            if (
                best_cost is None
                or bound < best_cost
                or (bound == best_cost and _lex_smaller_possible(search.assign, best_assign))
            ):
                improved = best_cost is None or bound < best_cost
                best_cost, best_assign = bound, list(search.assign)
                if improved:
                    lb = max(reported_lb, global_lb())
                    reported_lb = lb
                    stats.incumbents.append((Fraction(best_cost, scale), lb))
            continue
        if best_cost is not None and (
            bound > best_cost
            or (bound == best_cost and not _lex_smaller_possible(search.assign, best_assign, cands))
        ):
            stats.pruned += 1
            continue
        stack.append(_expand(search, cands, bound, stats))

    if interrupted:
        reported_lb = max(reported_lb, global_lb())
    stats.seconds = time.perf_counter() - start
    if best_assign is None:
        status = Status.NO_SOLUTION_WITHIN_LIMIT if interrupted else Status.INFEASIBLE
        return SolveResult(status, None, None, reported_lb if interrupted else Fraction(0), None, stats)

    placements = _placements_from(search, best_assign)
    emb = Embedding.from_placements(slices, placements)
    cost = evaluate_cost(net, slices, placements)
    if cost.total != Fraction(best_cost, scale):
        raise AssertionError(f"internal cost {Fraction(best_cost, scale)} != model cost {cost.total}")
    if not interrupted:
        return SolveResult(Status.OPTIMAL, emb, cost, cost.total, Fraction(0), stats)
    lb = min(reported_lb, cost.total)
    status = Status.OPTIMAL if lb == cost.total else Status.FEASIBLE_WITH_GAP
    return SolveResult(status, emb, cost, lb, _gap(cost.total, lb), stats)


def _peek(search: _Search, v, n):
    assign = list(search.assign)
    assign[v] = n
    return assign


def _expand(search: _Search, cands, node_bound, stats):
    """Pick the branching VNF; children are bounded lazily, cheapest placement first."""
    v = min(cands, key=lambda u: (len(cands[u]), u))
    children = [(node_bound, n) for _, n in sorted(cands[v])]
    return [v, children, 0, node_bound, None]


def brute_force(net: SubstrateNetwork, slices: Sequence[Slice], d_max, cap: int = 10**7) -> SolveResult:
    """Enumerate every kind-respecting assignment and keep the cheapest valid one."""
    _check_input(net, slices)
    start = time.perf_counter()
    order = _vnf_order(slices)
    node_ids = net.node_ids()
    domains = [[n for n in node_ids if net.node(n).kind is v.kind] for _, v in order]
    size = 1
    for d in domains:
        size *= len(d)
    if size > cap:
        raise InstanceTooLarge(f"{size} assignments exceed the cap of {cap}")
    best = None
    explored = 0
    for combo in itertools.product(*domains):
        explored += 1
        placements = {(s.id, v.id): n for (s, v), n in zip(order, combo)}
        emb = Embedding.from_placements(slices, placements)
        if not validate_embedding(net, slices, emb, d_max).ok:
            continue
        cost = evaluate_cost(net, slices, placements)
        rank = (cost.total, combo)
        if best is None or rank < best[0]:
            best = (rank, emb, cost)
    stats = SolveStats(nodes=explored, seconds=time.perf_counter() - start)
    if best is None:
        return SolveResult(Status.INFEASIBLE, None, None, Fraction(0), None, stats)
    _, emb, cost = best
    return SolveResult(Status.OPTIMAL, emb, cost, cost.total, Fraction(0), stats)


def lower_bound_of_partial(net, slices, d_max, partial: Mapping[Tuple[str, str], str]) -> Optional[Fraction]:
    """Solver bound at the search node fixing ``partial`` (None if it is pruned as infeasible)."""
    search = _Search(net, slices, d_max)
    nidx = {n: i for i, n in enumerate(search.node_ids)}
    for key, node in partial.items():
        v, n = search.vidx[key], nidx[node]
        if search.evaluate(v, n) is None:
            return None
        search.apply(v, n)
    bound, _ = search.bound()
    return None if bound is None else Fraction(bound, search.cost_scale)


def verify_result(net: SubstrateNetwork, slices: Sequence[Slice], d_max, result: SolveResult) -> ValidationReport:
    """Re-check a result's embedding and re-cost it independently."""
    report = ValidationReport()
    if result.embedding is None:
        report.add("no-embedding", f"result with status {result.status.value} carries no embedding")
        return report
    constraints = validate_embedding(net, slices, result.embedding, d_max)
    for fam in constraints.failed():
        for msg in constraints[fam].violations:
            report.add(fam, msg)
    try:
        recomputed = evaluate_cost(net, slices, result.embedding.placements)
    except ModelError as exc:
        report.add("cost", str(exc))
        return report
    if result.cost is None:
        report.add("cost-mismatch", "result carries no cost")
        return report
    for name in ("deployment", "communication", "total"):
        got, want = getattr(result.cost, name), getattr(recomputed, name)
        if got != want:
            report.add("cost-mismatch", f"{name}: reported {got}, recomputed {want}")
    if result.cost.per_slice != recomputed.per_slice:
        report.add("cost-mismatch", "per-slice costs differ from recomputation")
    if result.cost.total != result.cost.deployment + result.cost.communication:
        report.add("cost-mismatch", "total is not deployment + communication")
    if result.lower_bound > result.cost.total:
        report.add("bound", f"lower bound {result.lower_bound} exceeds cost {result.cost.total}")
    return report
