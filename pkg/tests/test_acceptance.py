"""End-to-end acceptance checks, one group per criterion.

Run alone with ``pytest tests/test_acceptance.py``; the terminal summary
prints a PASS/FAIL line for every criterion. The scenario two and three
solves use the full 300 s budget, so expect roughly six minutes.
"""

import random
import time
from fractions import Fraction

import pytest

from epcslice import cli
from epcslice.baseline import NoFeasibleSampleFound, sample_costs
from epcslice.formulation import build_ilp, embedding_to_vector
from epcslice.model import (
    Embedding,
    Endpoint,
    Slice,
    SliceEdge,
    SubstrateEdge,
    SubstrateNetwork,
    SubstrateNode,
    Vnf,
    evaluate_cost,
    validate_embedding,
)
from epcslice.scenario import paper_scenario, vnf_counts
from epcslice.solver import SolveParams, Status, brute_force, solve_exact, verify_result

from helpers import random_instance, random_placements

SCENARIOS = ("one", "two", "three")
LIMITS = {"one": 60, "two": 300, "three": 300}


@pytest.fixture(scope="module")
def scenario_runs():
    """Solver result per bundled scenario under the acceptance time budgets."""
    runs = {}
    for which in SCENARIOS:
        sc = paper_scenario(which)
        runs[which] = (sc, solve_exact(*sc, SolveParams(time_limit=LIMITS[which])))
    return runs


# --- 1 --------------------------------------------------------------------


@pytest.mark.acceptance(1)
def test_oracle_equivalence(record_property):
    start = time.perf_counter()
    feasible = 0
    for seed in range(240):
        net, slices, d_max = random_instance(random.Random(seed), coarse=seed % 2 == 1)
        got, want = solve_exact(net, slices, d_max), brute_force(net, slices, d_max)
        assert got.status is want.status, seed
        if want.has_solution:
            feasible += 1
            assert got.cost.total == want.cost.total, seed
            assert dict(got.embedding.placements) == dict(want.embedding.placements), seed
    elapsed = time.perf_counter() - start
    record_property("detail", f"240 instances, {feasible} feasible, {elapsed:.1f}s")
    assert feasible >= 60
    assert elapsed < 60


# --- 2 --------------------------------------------------------------------


@pytest.mark.acceptance(2)
def test_validator_matches_ilp_rows(record_property):
    rng = random.Random(2)
    checked = passing = costed = 0
    while checked < 400:
        net, slices, d_max = random_instance(rng)
        placements = random_placements(rng, net, slices)
        if placements is None:
            continue
        ilp = build_ilp(net, slices, d_max)
        emb = Embedding.from_placements(slices, placements)
        vec = embedding_to_vector(ilp, emb)
        report = validate_embedding(net, slices, emb, d_max)
        assert report.ok == (not ilp.violated(vec)), placements
        checked += 1
        passing += report.ok
        if "C6" not in report.failed():
            # communication cost is defined whenever every induced link exists
            cost = evaluate_cost(net, slices, placements)
            assert ilp.objective_value(vec) == cost.deployment + cost.communication
            costed += 1
    record_property("detail", f"{checked} assignments, {passing} valid, {costed} costed")
    assert passing >= 40 and costed >= 200


# --- 3 --------------------------------------------------------------------


@pytest.mark.acceptance(3)
@pytest.mark.parametrize("which", SCENARIOS)
def test_optimal_not_above_random(scenario_runs, which, record_property):
    (net, slices, d_max), res = scenario_runs[which]
    assert res.has_solution
    samples = sample_costs(net, slices, d_max, list(range(30)))
    feasible = [c for _, c in samples if not isinstance(c, NoFeasibleSampleFound)]
    assert feasible
    for c in feasible:
        assert c.total >= res.cost.total
        assert c.deployment >= res.cost.deployment
        assert c.communication >= res.cost.communication
    mean = sum((c.total for c in feasible), Fraction(0)) / len(feasible)
    record_property("detail", f"{which}: optimum {float(res.cost.total):.4f}, random mean {float(mean):.4f}")
    if which == "three":
        assert mean > res.cost.total


# --- 4 --------------------------------------------------------------------


@pytest.mark.acceptance(4)
def test_cost_grows_with_vnf_count(scenario_runs, record_property):
    totals = [scenario_runs[w][1].cost.total for w in SCENARIOS]
    record_property("detail", " <= ".join(f"{float(t):.4f}" for t in totals))
    assert totals == sorted(totals)


# --- 5 --------------------------------------------------------------------


@pytest.mark.acceptance(5)
def test_performance_envelope(scenario_runs, record_property):
    notes = []
    (sc, res) = scenario_runs["one"]
    assert res.status is Status.OPTIMAL and res.gap == 0
    assert res.stats.seconds <= 60
    notes.append(f"one: optimal in {res.stats.seconds:.1f}s")
    for which in ("two", "three"):
        sc, res = scenario_runs[which]
        assert res.has_solution and res.gap is not None and res.gap < 1
        assert res.stats.seconds <= 300 + 5
        assert verify_result(*sc, res).ok
        notes.append(f"{which}: {res.status.value} gap {float(res.gap):.4%} in {res.stats.seconds:.1f}s")
    record_property("detail", ", ".join(notes))


# --- 6 --------------------------------------------------------------------


@pytest.mark.acceptance(6)
@pytest.mark.parametrize("which,n", [("one", 7), ("two", 14), ("three", 28)])
def test_scenario_constants(which, n):
    net, slices, d_max = paper_scenario(which)
    assert d_max == 1555
    assert all(e.bandwidth == 10 and e.unit_bw_cost == Fraction("0.155") for e in net.edges)
    assert all(v.demand / node.capacity == Fraction("0.1") for s in slices for v in s.vnfs for node in net.nodes)
    assert all(e.bandwidth_demand == 1 for s in slices for e in s.edges)
    assert all(Fraction("0.0833") <= node.unit_cost <= Fraction("0.1776") for node in net.nodes)
    assert vnf_counts(slices) == {("icn", "compute"): n, ("traditional", "compute"): n, ("icn", "storage"): n}


# --- 7 --------------------------------------------------------------------


@pytest.mark.acceptance(7)
def test_compare_is_byte_identical(tmp_path, capsys, record_property):
    argv = ["compare", "--scenario", "one", "--scenario", "two", "--scenario", "three", "--node-limit", "4000", "--seeds", "30"]
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        assert cli.main(argv + ["--out", str(path)]) == 0
        outputs.append(path.read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1]
    record_property("detail", f"{len(outputs[0])} bytes, identical")


@pytest.mark.acceptance(7)
def test_optimal_cost_invariant_across_thread_counts(scenario_runs):
    sc, base = scenario_runs["one"]
    four = solve_exact(*sc, SolveParams(thread_count=4))
    assert four.cost.total == base.cost.total
    for seed in range(40):
        net, slices, d_max = random_instance(random.Random(seed))
        a = solve_exact(net, slices, d_max, SolveParams(thread_count=1))
        b = solve_exact(net, slices, d_max, SolveParams(thread_count=4))
        assert a.status is b.status
        if a.has_solution:
            assert a.cost.total == b.cost.total


# --- 8 --------------------------------------------------------------------


def _latency_instance(second_delay):
    net = SubstrateNetwork(
        [
            SubstrateNode("core", "compute", 10, "0.1"),
            SubstrateNode("edge-a", "storage", 10, "0.1"),
            SubstrateNode("edge-b", "storage", 10, "0.1"),
        ],
        [
            SubstrateEdge("edge-a", "core", 10, "0.155", 800),
            SubstrateEdge("core", "edge-b", 10, "0.155", second_delay),
        ],
    )
    s = Slice(
        "5g",
        "traditional",
        [Vnf("r", "compute", 1)],
        [Endpoint("w", "surrogate", "edge-a"), Endpoint("u", "user", "edge-b")],
        [SliceEdge("w", "r", 1, "VW"), SliceEdge("u", "r", 1, "UV")],
    )
    return net, [s], Embedding.from_placements([s], {("5g", "r"): "core"})


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("second_delay,ok", [(756, False), (755, True)])
def test_latency_boundary(second_delay, ok):
    net, slices, emb = _latency_instance(second_delay)
    report = validate_embedding(net, slices, emb, 1555)
    assert report.ok is ok
    assert report["C10"].passed is ok
    ilp = build_ilp(net, slices, 1555)
    (row,) = ilp.rows("C10")
    assert row.satisfied(embedding_to_vector(ilp, emb)) is ok
