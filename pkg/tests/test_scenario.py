import json
from collections import Counter
from fractions import Fraction

import pytest

from epcslice.model import EdgeClass, NodeKind, derive_subslices, validate_problem
from epcslice.scenario import (
    BANDWIDTH_UNIT_COST,
    CHAIN_LENGTH,
    D_MAX_MS,
    ParseError,
    SchemaVersionMismatch,
    ScenarioValidationError,
    bundled_names,
    bundled_text,
    dump_scenario,
    load_scenario,
    paper_scenario,
    reconstruct_scenario,
    resolve,
    scenario_to_dict,
    vnf_counts,
)


def tiny_doc():
    return json.loads(bundled_text("tiny"))


def test_bundled_names():
    assert bundled_names() == ["scenario-one", "scenario-three", "scenario-two", "tiny"]


@pytest.mark.parametrize("which", ["one", "two", "three"])
def test_bundled_files_equal_reconstruction(which):
    assert bundled_text(f"scenario-{which}") == dump_scenario(reconstruct_scenario(which))


@pytest.mark.parametrize("name", ["scenario-one", "scenario-two", "scenario-three", "tiny"])
def test_round_trip_is_identical(name):
    text = bundled_text(name)
    sc = load_scenario(text)
    assert dump_scenario(sc) == text
    assert load_scenario(dump_scenario(sc)) == sc


def test_scenario_unpacks_to_triple():
    net, slices, d_max = paper_scenario("one")
    assert d_max == 1555 and len(slices) == 2 and len(net.nodes) == 11


def test_unknown_edge_class_is_parse_error():
    doc = tiny_doc()
    doc["slices"][0]["edges"][0]["class"] = "XX"
    with pytest.raises(ParseError, match=r"slices\[0\]\.edges\[0\]\.class"):
        load_scenario(json.dumps(doc))


def test_unknown_field_rejected():
    doc = tiny_doc()
    doc["substrate"]["nodes"][0]["colour"] = "red"
    with pytest.raises(ParseError, match="colour"):
        load_scenario(json.dumps(doc))


def test_missing_field_rejected():
    doc = tiny_doc()
    del doc["params"]["d_max_ms"]
    with pytest.raises(ParseError, match="d_max_ms"):
        load_scenario(json.dumps(doc))


def test_bad_json_reports_line():
    with pytest.raises(ParseError, match="line 2"):
        load_scenario('{\n  "format_version": 1,,\n}')


def test_boolean_is_not_a_number():
    doc = tiny_doc()
    doc["substrate"]["nodes"][0]["capacity"] = True
    with pytest.raises(ParseError):
        load_scenario(json.dumps(doc))


def test_version_mismatch():
    doc = tiny_doc()
    doc["format_version"] = 2
    with pytest.raises(SchemaVersionMismatch):
        load_scenario(json.dumps(doc))


def test_model_violations_surface_as_validation_error():
    doc = tiny_doc()
    doc["substrate"]["edges"][0]["endpoints"] = ["A", "Z"]
    with pytest.raises(ScenarioValidationError, match="dangling-endpoint"):
        load_scenario(json.dumps(doc))


def test_decimal_text_stays_exact():
    doc = tiny_doc()
    text = json.dumps(doc).replace('"unit_cost": 0.5', '"unit_cost": 0.1000000000000000055511151231257827')
    sc = load_scenario(text)
    assert sc.net.node("S").unit_cost == Fraction("0.1000000000000000055511151231257827")
    assert load_scenario(dump_scenario(sc)).net.node("S").unit_cost == sc.net.node("S").unit_cost


def test_resolve_accepts_short_names_and_paths(tmp_path):
    assert resolve("one").name == "scenario-one"
    assert resolve("scenario-two").name == "scenario-two"
    path = tmp_path / "x.json"
    path.write_text(bundled_text("tiny"))
    assert resolve(str(path)).name == "tiny"
    with pytest.raises(FileNotFoundError):
        resolve(str(tmp_path / "missing.json"))


# --- evaluation constants -------------------------------------------------


@pytest.mark.parametrize("which,n", [("one", 7), ("two", 14), ("three", 28)])
def test_vnf_counts_per_column(which, n):
    net, slices, d_max = paper_scenario(which)
    assert vnf_counts(slices) == {
        ("icn", "compute"): n,
        ("icn", "storage"): n,
        ("traditional", "compute"): n,
    }
    assert CHAIN_LENGTH[which] == n


@pytest.mark.parametrize("which", ["one", "two", "three"])
def test_evaluation_constants(which):
    net, slices, d_max = paper_scenario(which)
    assert validate_problem(net, slices).ok
    assert d_max == 1555 == D_MAX_MS
    for e in net.edges:
        assert e.bandwidth == 10
        assert e.unit_bw_cost == Fraction("0.155") == BANDWIDTH_UNIT_COST
    for n in net.nodes:
        assert Fraction("0.0833") <= n.unit_cost <= Fraction("0.1776")
        assert n.capacity == 10
    costs = {n.unit_cost for n in net.nodes}
    assert Fraction("0.0833") in costs and Fraction("0.1776") in costs
    for s in slices:
        for v in s.vnfs:
            assert v.demand == Fraction(1, 10) * net.nodes[0].capacity
        for e in s.edges:
            assert e.bandwidth_demand == 1


def test_substrate_roles():
    net, slices, _ = paper_scenario("one")
    storage = [n.id for n in net.nodes if n.kind is NodeKind.STORAGE]
    assert sorted(storage) == ["pgw-san-jose", "sgw-los-angeles", "sgw-salt-lake-city", "sgw-seattle"]
    locations = {ep.location for s in slices for ep in s.endpoints}
    assert locations <= set(storage)
    kinds = {s.id: s.kind.value for s in slices}
    assert kinds == {"icn": "icn", "5g": "traditional"}
    assert all(v.kind is NodeKind.COMPUTE for v in slices[1].vnfs)


def test_scenarios_nest():
    def bag(which):
        _, slices, _ = paper_scenario(which)
        return Counter((s.id, v.id, v.kind, v.demand) for s in slices for v in s.vnfs)

    one, two, three = bag("one"), bag("two"), bag("three")
    assert not one - two and not two - three


def test_icn_subslices_of_scenario_one():
    # one per cache plus the origin server; each cache reaches the users through its router
    _, slices, _ = paper_scenario("one")
    icn = slices[0]
    subs = derive_subslices(icn)
    assert [s.source for s in subs] == [f"c{i:02d}" for i in range(1, 8)] + ["origin-west"]
    assert set(subs[2].edges) == {("users-west", "r01"), ("r01", "r02"), ("r02", "r03"), ("r03", "c03")}
    origin = subs[-1]
    assert len(origin.edges) == 1 + 6 + 1
    assert all(
        next(e for e in icn.edges if (e.a, e.b) == pair).cls is not EdgeClass.VV or pair[1][0] == "r"
        for pair in origin.edges
    )


def test_to_dict_omits_empty_optionals():
    doc = scenario_to_dict(paper_scenario("one"))
    assert "subslices" not in doc["slices"][0]
    assert doc["params"] == {"d_max_ms": 1555}
