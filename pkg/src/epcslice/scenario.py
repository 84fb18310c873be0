"""Scenario documents: strict, versioned JSON with exact decimal numbers.

Schema (``format_version`` 1)::

    {
      "format_version": 1,
      "name": "scenario-one",
      "description": "...",                       # optional
      "substrate": {
        "nodes": [{"id", "kind", "capacity", "unit_cost", "label"?}],
        "edges": [{"endpoints": [a, b], "bandwidth", "unit_bw_cost", "delay_ms"}]
      },
      "slices": [{
        "id", "kind",                              # kind: "icn" | "traditional"
        "vnfs": [{"id", "kind", "demand"}],
        "endpoints": [{"id", "role", "location"}], # role: "user" | "surrogate"
        "edges": [{"endpoints": [a, b], "class", "bandwidth_demand"}],
        "subslices": [{"source", "edges": [[a, b], ...]}]   # optional
      }],
      "params": {"d_max_ms"}
    }

Numbers are read without passing through binary floating point. Unknown
keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterator, List, Sequence

from ._numbers import decimal_str, is_terminating, to_fraction
from .model import (
    EdgeClass,
    Endpoint,
    NodeKind,
    Role,
    Slice,
    SliceEdge,
    SliceKind,
    SubSlice,
    SubstrateEdge,
    SubstrateNetwork,
    SubstrateNode,
    Vnf,
    validate_problem,
)

FORMAT_VERSION = 1
EVALUATION_SCENARIOS = ("one", "two", "three")


class ScenarioError(Exception):
    pass


class ParseError(ScenarioError):
    pass


class SchemaVersionMismatch(ScenarioError):
    pass


class ScenarioValidationError(ScenarioError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    net: SubstrateNetwork
    slices: tuple
    d_max: Fraction
    description: str = ""

    def __iter__(self) -> Iterator:
        return iter((self.net, list(self.slices), self.d_max))


# --------------------------------------------------------------------------
# reading
# --------------------------------------------------------------------------


def _fields(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {', '.join(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(missing)}")
    return obj


def _number(value, where) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction, str)):
        raise ParseError(f"{where}: expected a number")
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: {value!r} is not a number") from None


def _string(value, where) -> str:
    if not isinstance(value, str) or not value:
        raise ParseError(f"{where}: expected a non-empty string")
    return value


def _enum(enum, value, where):
    try:
        return enum(value)
    except ValueError:
        allowed = ", ".join(repr(m.value) for m in enum)
        raise ParseError(f"{where}: {value!r} is not one of {allowed}") from None


def _pair(value, where):
    if not (isinstance(value, list) and len(value) == 2):
        raise ParseError(f"{where}: expected a two-element list")
    return _string(value[0], f"{where}[0]"), _string(value[1], f"{where}[1]")


def _list(value, where):
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list")
    return value


def _read_slice(raw, where) -> Slice:
    _fields(raw, where, ("id", "kind", "vnfs", "endpoints", "edges"), ("subslices",))
    sid = _string(raw["id"], f"{where}.id")
    vnfs = []
    for i, v in enumerate(_list(raw["vnfs"], f"{where}.vnfs")):
        w = f"{where}.vnfs[{i}]"
        _fields(v, w, ("id", "kind", "demand"))
        vnfs.append(Vnf(_string(v["id"], f"{w}.id"), _enum(NodeKind, v["kind"], f"{w}.kind"), _number(v["demand"], f"{w}.demand")))
    endpoints = []
    for i, ep in enumerate(_list(raw["endpoints"], f"{where}.endpoints")):
        w = f"{where}.endpoints[{i}]"
        _fields(ep, w, ("id", "role", "location"))
        endpoints.append(
            Endpoint(_string(ep["id"], f"{w}.id"), _enum(Role, ep["role"], f"{w}.role"), _string(ep["location"], f"{w}.location"))
        )
    edges = []
    for i, e in enumerate(_list(raw["edges"], f"{where}.edges")):
        w = f"{where}.edges[{i}]"
        _fields(e, w, ("endpoints", "class", "bandwidth_demand"))
        a, b = _pair(e["endpoints"], f"{w}.endpoints")
        edges.append(SliceEdge(a, b, _number(e["bandwidth_demand"], f"{w}.bandwidth_demand"), _enum(EdgeClass, e["class"], f"{w}.class")))
    subslices = None
    if "subslices" in raw:
        subslices = []
        for i, sub in enumerate(_list(raw["subslices"], f"{where}.subslices")):
            w = f"{where}.subslices[{i}]"
            _fields(sub, w, ("source", "edges"))
            pairs = tuple(_pair(p, f"{w}.edges[{j}]") for j, p in enumerate(_list(sub["edges"], f"{w}.edges")))
            subslices.append(SubSlice(sid, _string(sub["source"], f"{w}.source"), pairs))
    return Slice(sid, _enum(SliceKind, raw["kind"], f"{where}.kind"), tuple(vnfs), tuple(endpoints), tuple(edges), subslices)


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document."""
    try:
        doc = json.loads(text, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _fields(doc, "document", ("format_version", "name", "substrate", "slices", "params"), ("description",))
    if doc["format_version"] != FORMAT_VERSION:
        raise SchemaVersionMismatch(
            f"document has format_version {doc['format_version']!r}, this reader supports {FORMAT_VERSION}"
        )
    name = _string(doc["name"], "name")
    description = doc.get("description", "")
    if not isinstance(description, str):
        raise ParseError("description: expected a string")

    sub = _fields(doc["substrate"], "substrate", ("nodes", "edges"))
    nodes = []
    for i, n in enumerate(_list(sub["nodes"], "substrate.nodes")):
        w = f"substrate.nodes[{i}]"
        _fields(n, w, ("id", "kind", "capacity", "unit_cost"), ("label",))
        label = n.get("label", "")
        if not isinstance(label, str):
            raise ParseError(f"{w}.label: expected a string")
        nodes.append(
            SubstrateNode(
                _string(n["id"], f"{w}.id"),
                _enum(NodeKind, n["kind"], f"{w}.kind"),
                _number(n["capacity"], f"{w}.capacity"),
                _number(n["unit_cost"], f"{w}.unit_cost"),
                label,
            )
        )
    edges = []
    for i, e in enumerate(_list(sub["edges"], "substrate.edges")):
        w = f"substrate.edges[{i}]"
        _fields(e, w, ("endpoints", "bandwidth", "unit_bw_cost", "delay_ms"))
        a, b = _pair(e["endpoints"], f"{w}.endpoints")
        edges.append(
            SubstrateEdge(
                a,
                b,
                _number(e["bandwidth"], f"{w}.bandwidth"),
                _number(e["unit_bw_cost"], f"{w}.unit_bw_cost"),
                _number(e["delay_ms"], f"{w}.delay_ms"),
            )
        )
    net = SubstrateNetwork(tuple(nodes), tuple(edges))
    slices = tuple(_read_slice(s, f"slices[{i}]") for i, s in enumerate(_list(doc["slices"], "slices")))
    params = _fields(doc["params"], "params", ("d_max_ms",))
    d_max = _number(params["d_max_ms"], "params.d_max_ms")

    report = validate_problem(net, slices)
    if not report.ok:
        raise ScenarioValidationError(str(report))
    return Scenario(name, net, slices, d_max, description)


def load_scenario_file(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(fh.read())


# --------------------------------------------------------------------------
# writing
# --------------------------------------------------------------------------


def _encode_number(value: Fraction):
    value = to_fraction(value)
    if value.denominator == 1:
        return value.numerator
    if not is_terminating(value):
        return f"{value.numerator}/{value.denominator}"
    text = decimal_str(value)
    # shortest float repr reproduces short decimals exactly; otherwise keep text
    if repr(float(text)) == text:
        return float(text)
    return text


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {"format_version": FORMAT_VERSION, "name": sc.name}
    if sc.description:
        doc["description"] = sc.description
    doc["substrate"] = {
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "capacity": _encode_number(n.capacity),
                "unit_cost": _encode_number(n.unit_cost),
                **({"label": n.label} if n.label else {}),
            }
            for n in sc.net.nodes
        ],
        "edges": [
            {
                "endpoints": [e.a, e.b],
                "bandwidth": _encode_number(e.bandwidth),
                "unit_bw_cost": _encode_number(e.unit_bw_cost),
                "delay_ms": _encode_number(e.delay),
            }
            for e in sc.net.edges
        ],
    }
    slices = []
    for s in sc.slices:
        raw = {
            "id": s.id,
            "kind": s.kind.value,
            "vnfs": [{"id": v.id, "kind": v.kind.value, "demand": _encode_number(v.demand)} for v in s.vnfs],
            "endpoints": [{"id": ep.id, "role": ep.role.value, "location": ep.location} for ep in s.endpoints],
            "edges": [
                {"endpoints": [e.a, e.b], "class": e.cls.value, "bandwidth_demand": _encode_number(e.bandwidth_demand)}
                for e in s.edges
            ],
        }
        if s.subslices is not None:
            raw["subslices"] = [{"source": sub.source, "edges": [list(p) for p in sub.edges]} for sub in s.subslices]
        slices.append(raw)
    doc["slices"] = slices
    doc["params"] = {"d_max_ms": _encode_number(sc.d_max)}
    return doc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


# --------------------------------------------------------------------------
# bundled reconstructions of the three evaluation scenarios
# --------------------------------------------------------------------------

# Western-US EPC sites. Prices are per-location electricity prices ($/kWh)
# picked inside the published 0.0833-0.1776 range; coordinates only feed the
# static delay table below.
STORAGE_SITES = (
    ("pgw-san-jose", "P-GW San Jose", "0.1776", (37.34, -121.89)),
    ("sgw-seattle", "S-GW Seattle", "0.0833", (47.61, -122.33)),
    ("sgw-los-angeles", "S-GW Los Angeles", "0.1652", (34.05, -118.24)),
    ("sgw-salt-lake-city", "S-GW Salt Lake City", "0.0871", (40.76, -111.89)),
)
CORE_SITES = (
    ("core-portland", "core router Portland", "0.1036", (45.52, -122.68)),
    ("core-sacramento", "core router Sacramento", "0.1544", (38.58, -121.49)),
    ("core-reno", "core router Reno", "0.0943", (39.53, -119.81)),
    ("core-boise", "core router Boise", "0.0862", (43.62, -116.20)),
    ("core-las-vegas", "core router Las Vegas", "0.1149", (36.17, -115.14)),
    ("core-phoenix", "core router Phoenix", "0.1231", (33.45, -112.07)),
    ("core-fresno", "core router Fresno", "0.1687", (36.74, -119.79)),
)
USER_SITES = ("sgw-seattle", "sgw-los-angeles")
SURROGATE_SITES = ("pgw-san-jose", "sgw-salt-lake-city")

NODE_CAPACITY = Fraction(10)
VNF_DEMAND_FRACTION = Fraction(1, 10)
LINK_BANDWIDTH_GBPS = Fraction(10)
BANDWIDTH_UNIT_COST = Fraction("0.155")
VIRTUAL_EDGE_GBPS = Fraction(1)
D_MAX_MS = Fraction(1555)
CHAIN_LENGTH = {"one": 7, "two": 14, "three": 28}


def _ping_ms(p, q) -> Fraction:
    """Ping-like delay: 5 ms access overhead plus ~1.8 ms per 100 km great-circle."""
    lat1, lon1, lat2, lon2 = map(math.radians, (*p, *q))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    km = 2 * 6371 * math.asin(math.sqrt(h))
    return Fraction(str(round(5 + 0.018 * km, 1)))


def reconstruct_substrate() -> SubstrateNetwork:
    nodes = [
        SubstrateNode(i, NodeKind.STORAGE, NODE_CAPACITY, Fraction(p), label)
        for i, label, p, _ in STORAGE_SITES
    ] + [
        SubstrateNode(i, NodeKind.COMPUTE, NODE_CAPACITY, Fraction(p), label)
        for i, label, p, _ in CORE_SITES
    ]
    where = {i: xy for i, _, _, xy in STORAGE_SITES + CORE_SITES}
    pairs = []
    core = [c[0] for c in CORE_SITES]
    for a_i, a in enumerate(core):
        pairs.extend((a, b) for b in core[a_i + 1 :])
    pairs.extend((c, s[0]) for c in core for s in STORAGE_SITES)
    pairs.extend(("pgw-san-jose", s[0]) for s in STORAGE_SITES[1:])  # S5 interfaces
    edges = [
        SubstrateEdge(a, b, LINK_BANDWIDTH_GBPS, BANDWIDTH_UNIT_COST, _ping_ms(where[a], where[b]))
        for a, b in pairs
    ]
    return SubstrateNetwork(tuple(nodes), tuple(edges))


def reconstruct_slices(chain_length: int) -> List[Slice]:
    """ICN slice (compute chain, one cache per router) and traditional compute chain."""
    demand = NODE_CAPACITY * VNF_DEMAND_FRACTION
    bw = VIRTUAL_EDGE_GBPS
    width = max(2, len(str(chain_length)))

    def chain(prefix):
        return [f"{prefix}{i:0{width}d}" for i in range(1, chain_length + 1)]

    compute, caches = chain("r"), chain("c")
    icn_edges = [SliceEdge("users-west", compute[0], bw, EdgeClass.UV)]
    icn_edges += [SliceEdge(a, b, bw, EdgeClass.VV) for a, b in zip(compute, compute[1:])]
    icn_edges += [SliceEdge(r, c, bw, EdgeClass.VV) for r, c in zip(compute, caches)]
    icn_edges.append(SliceEdge(compute[-1], "origin-west", bw, EdgeClass.VW))
    icn = Slice(
        "icn",
        SliceKind.ICN,
        tuple(Vnf(r, NodeKind.COMPUTE, demand) for r in compute) + tuple(Vnf(c, NodeKind.STORAGE, demand) for c in caches),
        (Endpoint("users-west", "user", USER_SITES[0]), Endpoint("origin-west", "surrogate", SURROGATE_SITES[0])),
        tuple(icn_edges),
    )
    routers = chain("r")
    ip_edges = [SliceEdge("users-south", routers[0], bw, EdgeClass.UV)]
    ip_edges += [SliceEdge(a, b, bw, EdgeClass.VV) for a, b in zip(routers, routers[1:])]
    ip_edges.append(SliceEdge(routers[-1], "origin-south", bw, EdgeClass.VW))
    ip = Slice(
        "5g",
        SliceKind.TRADITIONAL,
        tuple(Vnf(r, NodeKind.COMPUTE, demand) for r in routers),
        (Endpoint("users-south", "user", USER_SITES[1]), Endpoint("origin-south", "surrogate", SURROGATE_SITES[1])),
        tuple(ip_edges),
    )
    return [icn, ip]


def reconstruct_scenario(which: str) -> Scenario:
    n = CHAIN_LENGTH[which]
    description = (
        "Reconstruction: western-US virtualized EPC (1 P-GW + 3 S-GWs offering storage, "
        f"{len(CORE_SITES)} core routers offering compute). Prices and delays are illustrative "
        f"values on an assumed topology. ICN slice: {n} compute + {n} storage VNFs; traditional slice: {n} compute VNFs."
    )
    return Scenario(f"scenario-{which}", reconstruct_substrate(), tuple(reconstruct_slices(n)), D_MAX_MS, description)


def bundled_names() -> List[str]:
    files = resources.files("epcslice") / "data"
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def bundled_text(name: str) -> str:
    path = resources.files("epcslice") / "data" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return path.read_text(encoding="utf-8")


def paper_scenario(which: str) -> Scenario:
    if which not in EVALUATION_SCENARIOS:
        raise ValueError(f"evaluation scenarios are {', '.join(EVALUATION_SCENARIOS)}")
    return load_scenario(bundled_text(f"scenario-{which}"))


def resolve(ref: str) -> Scenario:
    """Scenario by bundled name (``one``, ``scenario-one``, ``tiny``...) or file path."""
    if ref in EVALUATION_SCENARIOS:
        ref = f"scenario-{ref}"
    if "/" not in ref and not ref.endswith(".json") and ref in bundled_names():
        return load_scenario(bundled_text(ref))
    return load_scenario_file(ref)


def vnf_counts(slices: Sequence[Slice]) -> dict:
    out = {}
    for s in slices:
        for v in s.vnfs:
            key = (s.kind.value, v.kind.value)
            out[key] = out.get(key, 0) + 1
    return out
