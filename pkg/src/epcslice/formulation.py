"""0-1 integer program for the slice embedding problem, plus LP-format I/O.

Variables
    ``x`` for every kind-compatible (VNF, node) pair and ``y`` for every
    VNF-VNF edge, substrate link and orientation whose two ``x`` exist.
    User/surrogate edges have one fixed end, so their link indicator equals a
    single ``x`` and is substituted directly into objective, bandwidth and
    latency rows.

Row families (``LinearConstraint.tag``)
    C1   each VNF placed exactly once
    C2   node capacity
    C3   link bandwidth
    C6   single-link routability: two ends of a virtual edge may not sit on
         distinct nodes without a substrate link between them
    C7, C8, C9  product linearisation of ``y = x * x'``
    C10  sub-slice latency

Rows whose left side is empty and trivially satisfied are omitted; an empty
C1 row is kept because it makes the instance infeasible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ._numbers import decimal_str, to_fraction
from .model import (
    COLOCATED,
    EdgeClass,
    Embedding,
    ModelError,
    Slice,
    SubstrateNetwork,
    derive_subslices,
    validate_problem,
)


class IncompatibleEmbedding(ModelError):
    pass


class LpParseError(ValueError):
    pass


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass(frozen=True)
class IlpVariable:
    name: str
    key: tuple  # ("x", slice, vnf, node) or ("y", slice, v, v2, n, n2)


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: Tuple[Tuple[Fraction, str], ...]
    relation: Relation
    rhs: Fraction
    tag: str

    def lhs(self, values: Mapping[str, int]) -> Fraction:
        return sum((c * values.get(v, 0) for c, v in self.terms), Fraction(0))

    def satisfied(self, values: Mapping[str, int]) -> bool:
        lhs = self.lhs(values)
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        if self.relation is Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class IlpInstance:
    variables: List[IlpVariable] = field(default_factory=list)
    constraints: List[LinearConstraint] = field(default_factory=list)
    objective: List[Tuple[Fraction, str]] = field(default_factory=list)
    objective_constant: Fraction = Fraction(0)
    sense: str = "minimize"

    def __post_init__(self):
        self._by_key = {v.key: v.name for v in self.variables}

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    def var(self, key: tuple) -> Optional[str]:
        return self._by_key.get(key)

    def rows(self, tag: str) -> List[LinearConstraint]:
        return [c for c in self.constraints if c.tag == tag]

    def objective_value(self, values: Mapping[str, int]) -> Fraction:
        return self.objective_constant + sum(
            (c * values.get(v, 0) for c, v in self.objective), Fraction(0)
        )

    def violated(self, values: Mapping[str, int]) -> List[LinearConstraint]:
        return [c for c in self.constraints if not c.satisfied(values)]

    def canonical(self):
        """Order-free structural fingerprint used for round-trip comparison."""
        objective = {}
        for c, v in self.objective:
            objective[v] = objective.get(v, Fraction(0)) + c
        rows = sorted(
            (
                c.tag,
                c.relation.value,
                c.rhs,
                tuple(sorted((v, k) for k, v in c.terms)),
            )
            for c in self.constraints
        )
        return (
            sorted(self.names),
            {v: c for v, c in objective.items() if c != 0},
            self.objective_constant,
            rows,
        )


_ILLEGAL = re.compile(r"[^A-Za-z0-9_.]")


def _sanitize(parts) -> str:
    return "_".join(_ILLEGAL.sub("_", str(p)) for p in parts)


class _Builder:
    def __init__(self):
        self.variables: List[IlpVariable] = []
        self.by_key: Dict[tuple, str] = {}
        self.used = set()
        self.constraints: List[LinearConstraint] = []
        self.counter: Dict[str, int] = {}

    def add_var(self, key: tuple) -> str:
        name = _sanitize(key)
        base, i = name, 1
        while name in self.used:
            i += 1
            name = f"{base}_{i}"
        self.used.add(name)
        self.by_key[key] = name
        self.variables.append(IlpVariable(name, key))
        return name

    def add_row(self, tag, terms, relation, rhs, keep_empty=False):
        merged: Dict[str, Fraction] = {}
        for coef, var in terms:
            merged[var] = merged.get(var, Fraction(0)) + to_fraction(coef)
        terms = tuple((c, v) for v, c in merged.items() if c != 0)
        if not terms and not keep_empty:
            return
        self.counter[tag] = self.counter.get(tag, 0) + 1
        self.constraints.append(
            LinearConstraint(f"{tag}_{self.counter[tag]}", terms, Relation(relation), to_fraction(rhs), tag)
        )


def build_ilp(net: SubstrateNetwork, slices: Sequence[Slice], d_max) -> IlpInstance:
    report = validate_problem(net, slices)
    if not report.ok:
        raise ModelError(str(report))
    d_max = to_fraction(d_max)
    bld = _Builder()
    node_ids = net.node_ids()
    links = net.sorted_edges()

    # x variables, kind restricted
    for s in slices:
        for v in sorted(s.vnfs, key=lambda v: v.id):
            for n in node_ids:
                if net.node(n).kind is v.kind:
                    bld.add_var(("x", s.id, v.id, n))

    def x(s, v, n):
        return bld.by_key.get(("x", s.id, v, n))

    # y variables for VNF-VNF edges, both orientations of every link
    for s in slices:
        for e in s.edges:
            if e.cls is not EdgeClass.VV:
                continue
            for link in links:
                for n, n2 in ((link.a, link.b), (link.b, link.a)):
                    if x(s, e.a, n) and x(s, e.b, n2):
                        bld.add_var(("y", s.id, e.a, e.b, n, n2))

    def y(s, e, n, n2):
        return bld.by_key.get(("y", s.id, e.a, e.b, n, n2))

    def fixed_terms(s, e, weight):
        """(coef, x) pairs for an edge with one fixed end; weight(link) per unit demand."""
        vnf, fixed = (e.b, e.a) if s.endpoint(e.a) is not None else (e.a, e.b)
        loc = s.endpoint(fixed).location
        out = []
        for n in net.neighbors(loc):
            var = x(s, vnf, n)
            if var:
                out.append((weight(net.edge(n, loc)) * e.bandwidth_demand, var))
        return out

    objective = []
    for s in slices:
        for v in sorted(s.vnfs, key=lambda v: v.id):
            for n in node_ids:
                var = x(s, v.id, n)
                if var:
                    objective.append((net.node(n).unit_cost * v.demand, var))
    for s in slices:
        for e in s.edges:
            if e.cls is EdgeClass.VV:
                for link in links:
                    for n, n2 in ((link.a, link.b), (link.b, link.a)):
                        var = y(s, e, n, n2)
                        if var:
                            objective.append((link.unit_bw_cost * e.bandwidth_demand, var))
            else:
                objective.extend(fixed_terms(s, e, lambda link: link.unit_bw_cost))

    # C1
    for s in slices:
        for v in sorted(s.vnfs, key=lambda v: v.id):
            terms = [(1, x(s, v.id, n)) for n in node_ids if x(s, v.id, n)]
            bld.add_row("C1", terms, "=", 1, keep_empty=True)

    # C2
    for n in node_ids:
        terms = [
            (v.demand, x(s, v.id, n))
            for s in slices
            for v in sorted(s.vnfs, key=lambda v: v.id)
            if x(s, v.id, n)
        ]
        bld.add_row("C2", terms, "<=", net.node(n).capacity)

    # C3
    for link in links:
        terms = []
        for s in slices:
            for e in s.edges:
                if e.cls is EdgeClass.VV:
                    for n, n2 in ((link.a, link.b), (link.b, link.a)):
                        var = y(s, e, n, n2)
                        if var:
                            terms.append((e.bandwidth_demand, var))
                else:
                    vnf, fixed = (e.b, e.a) if s.endpoint(e.a) is not None else (e.a, e.b)
                    loc = s.endpoint(fixed).location
                    if loc in (link.a, link.b):
                        var = x(s, vnf, link.other(loc))
                        if var:
                            terms.append((e.bandwidth_demand, var))
        bld.add_row("C3", terms, "<=", link.bandwidth)

    # C6: forbid placements that would need a non-existent link
    for s in slices:
        for e in s.edges:
            if e.cls is EdgeClass.VV:
                for n in node_ids:
                    for n2 in node_ids:
                        if n == n2 or net.edge(n, n2) is not None:
                            continue
                        xa, xb = x(s, e.a, n), x(s, e.b, n2)
                        if xa and xb:
                            bld.add_row("C6", [(1, xa), (1, xb)], "<=", 1)
            else:
                vnf, fixed = (e.b, e.a) if s.endpoint(e.a) is not None else (e.a, e.b)
                loc = s.endpoint(fixed).location
                for n in node_ids:
                    var = x(s, vnf, n)
                    if var and n != loc and net.edge(n, loc) is None:
                        bld.add_row("C6", [(1, var)], "<=", 0)

    # C7-C9
    for s in slices:
        for e in s.edges:
            if e.cls is not EdgeClass.VV:
                continue
            for link in links:
                for n, n2 in ((link.a, link.b), (link.b, link.a)):
                    var = y(s, e, n, n2)
                    if not var:
                        continue
                    xa, xb = x(s, e.a, n), x(s, e.b, n2)
                    bld.add_row("C7", [(1, var), (-1, xa)], "<=", 0)
                    bld.add_row("C8", [(1, var), (-1, xb)], "<=", 0)
                    bld.add_row("C9", [(1, var), (-1, xa), (-1, xb)], ">=", -1)

    # C10
    for s in slices:
        by_pair = {(e.a, e.b): e for e in s.edges}
        for sub in derive_subslices(s):
            terms = []
            for pair in sub.edges:
                e = by_pair[pair]
                if e.cls is EdgeClass.VV:
                    for link in links:
                        for n, n2 in ((link.a, link.b), (link.b, link.a)):
                            var = y(s, e, n, n2)
                            if var:
                                terms.append((link.delay * e.bandwidth_demand, var))
                else:
                    terms.extend(fixed_terms(s, e, lambda link: link.delay))
            bld.add_row("C10", terms, "<=", d_max)

    return IlpInstance(
        variables=bld.variables,
        constraints=bld.constraints,
        objective=[(to_fraction(c), v) for c, v in objective if c != 0],
    )


def embedding_to_vector(ilp: IlpInstance, emb: Embedding) -> Dict[str, int]:
    """0/1 value for every instance variable encoding ``emb``."""
    values = {name: 0 for name in ilp.names}
    for (slice_id, vnf_id), node in emb.placements.items():
        var = ilp.var(("x", slice_id, vnf_id, node))
        if var is None:
            raise IncompatibleEmbedding(f"no variable for {vnf_id} of slice {slice_id} on node {node}")
        values[var] = 1
    for (slice_id, a, b), target in emb.induced_links.items():
        if target is COLOCATED:
            continue
        var = ilp.var(("y", slice_id, a, b) + tuple(target))
        if var is not None:
            values[var] = 1
    return values


# --------------------------------------------------------------------------
# LP format
# --------------------------------------------------------------------------


def _fmt_terms(terms) -> str:
    parts = []
    for coef, var in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{decimal_str(mag)} {var}"
        parts.append(f"{sign} {body}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _wrap(text: str, indent: str = "   ", width: int = 240) -> List[str]:
    lines, cur = [], ""
    for tok in text.split(" "):
        if cur and len(cur) + 1 + len(tok) > width and tok in ("+", "-"):
            lines.append(cur)
            cur = indent + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    if cur:
        lines.append(cur)
    return lines


def export_lp(ilp: IlpInstance) -> str:
    """CPLEX LP text. Coefficients are printed as exact decimals.

    Raises ValueError if a coefficient has no finite decimal expansion;
    instances built from decimal input never do.
    """
    out = ["\\ slice embedding ILP", "Minimize"]
    obj = _fmt_terms(ilp.objective)
    if ilp.objective_constant:
        const = decimal_str(ilp.objective_constant)
        obj = f"{obj} + {const}" if obj else const
    out.extend(_wrap(f" obj: {obj}".rstrip()))
    out.append("Subject To")
    for c in ilp.constraints:
        lhs = _fmt_terms(c.terms) or "0 " + (ilp.names[0] if ilp.names else "")
        out.extend(_wrap(f" {c.name}: {lhs} {c.relation.value} {decimal_str(c.rhs)}"))
    if ilp.names:
        out.append("Binary")
        out.extend(_wrap(" " + " ".join(ilp.names)))
    out.append("End")
    return "\n".join(out) + "\n"


_TOKEN = re.compile(
    r"\s*(?:(?P<rel><=|>=|=<|=>|<|>|=)|(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<op>[+-])|(?P<name>[A-Za-z_][A-Za-z0-9_.]*)|(?P<colon>:))"
)

_SECTIONS = {
    "minimize": "obj",
    "minimise": "obj",
    "minimum": "obj",
    "min": "obj",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binary": "bin",
    "binaries": "bin",
    "bin": "bin",
    "end": "end",
}


def _tokens(text: str, lineno: int):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpParseError(f"line {lineno}: cannot read {text[pos:]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


def _parse_expr(tokens, lineno):
    """Linear expression -> (terms, constant)."""
    terms, constant = [], Fraction(0)
    sign, coef, dangling = 1, None, False
    for kind, val in tokens:
        if kind == "op":
            if coef is not None:
                constant += sign * coef
                coef = None
            elif dangling:
                raise LpParseError(f"line {lineno}: two operators in a row")
            sign, dangling = (-1 if val == "-" else 1), True
        elif kind == "num":
            if coef is not None:
                raise LpParseError(f"line {lineno}: two numbers in a row")
            coef = Fraction(val)
        elif kind == "name":
            terms.append((sign * (coef if coef is not None else 1), val))
            sign, coef, dangling = 1, None, False
        else:
            raise LpParseError(f"line {lineno}: unexpected {val!r}")
    if coef is not None:
        constant += sign * coef
    elif dangling:
        raise LpParseError(f"line {lineno}: expression ends with an operator")
    return terms, constant


def parse_lp(text: str) -> IlpInstance:
    """Parse the LP subset written by :func:`export_lp` back into an instance."""
    section = None
    statements: Dict[str, List[Tuple[int, str]]] = {"obj": [], "rows": [], "bounds": [], "bin": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        lowered = line.lower()
        if lowered in _SECTIONS:
            section = _SECTIONS[lowered]
            if section == "end":
                break
            continue
        if section is None:
            raise LpParseError(f"line {lineno}: content before any section")
        if section in ("obj", "rows") and raw[:1].isspace() and raw.strip()[:1] in "+-" and statements[section]:
            prev_no, prev = statements[section][-1]
            statements[section][-1] = (prev_no, prev + " " + line)
        else:
            statements[section].append((lineno, line))

    objective, constant = [], Fraction(0)
    for lineno, line in statements["obj"]:
        toks = _tokens(line, lineno)
        if len(toks) >= 2 and toks[0][0] == "name" and toks[1][0] == "colon":
            toks = toks[2:]
        terms, const = _parse_expr(toks, lineno)
        objective.extend(terms)
        constant += const

    constraints = []
    for lineno, line in statements["rows"]:
        toks = _tokens(line, lineno)
        if len(toks) < 2 or toks[0][0] != "name" or toks[1][0] != "colon":
            raise LpParseError(f"line {lineno}: constraint rows must be named")
        name = toks[0][1]
        rel_at = [i for i, t in enumerate(toks) if t[0] == "rel"]
        if len(rel_at) != 1:
            raise LpParseError(f"line {lineno}: expected one relation")
        i = rel_at[0]
        if i + 1 == len(toks):
            raise LpParseError(f"line {lineno}: missing right-hand side")
        terms, lconst = _parse_expr(toks[2:i], lineno)
        rterms, rconst = _parse_expr(toks[i + 1 :], lineno)
        if rterms:
            raise LpParseError(f"line {lineno}: variables on the right-hand side")
        rel = toks[i][1].replace("=<", "<=").replace("=>", ">=")
        rel = {"<": "<=", ">": ">="}.get(rel, rel)
        merged: Dict[str, Fraction] = {}
        for c, v in terms:
            merged[v] = merged.get(v, Fraction(0)) + c
        constraints.append(
            LinearConstraint(
                name,
                tuple((c, v) for v, c in merged.items() if c != 0),
                Relation(rel),
                rconst - lconst,
                name.rsplit("_", 1)[0],
            )
        )

    names = []
    for lineno, line in statements["bin"]:
        names.extend(line.split())
    return IlpInstance(
        variables=[IlpVariable(n, ("lp", n)) for n in names],
        constraints=constraints,
        objective=objective,
        objective_constant=constant,
    )
