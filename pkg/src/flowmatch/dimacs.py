"""DIMACS-style instance files: parsing, serialization, seeded generation.

Max-flow files: comment lines start with `c`, one `p max <nodes> <arcs>`
problem line, `n <id> s` / `n <id> t` terminal designators, and
`a <tail> <head> <capacity>` arc lines.  Assignment files: `p asn <nodes>
<edges>`, `n <id>` lines marking the X side, and `a <x> <y> <weight>` edge
lines.  Ids are 1-indexed in files and 0-indexed internally.

Serialization is canonical (no comments, fixed line order), so parsing a
generated file and serializing the result is byte-exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .assign_scaling import AssignmentInstance
from .graph import FlowNetwork, build_network


class ParseError(ValueError):
    """Malformed instance file; the message carries a line number if known."""


@dataclass(frozen=True)
class InstanceFile:
    """A parsed or generated instance, 0-indexed, plus its file identity.

    records holds (tail, head, capacity) arcs for maxflow instances and
    (x, y, weight) edges for assignment instances.  node_count is the total
    node count (2n for an assignment over sides of size n).
    """

    kind: str
    node_count: int
    records: tuple[tuple[int, int, int], ...]
    source: int | None = None
    sink: int | None = None

    def to_text(self) -> str:
        if self.kind == "maxflow":
            return serialize_max(
                self.node_count, self.records, self.source, self.sink
            )
        return serialize_asn(self.node_count // 2, self.records)

    def to_network(self) -> FlowNetwork:
        if self.kind != "maxflow":
            raise ValueError(f"not a maxflow instance: kind={self.kind!r}")
        return build_network(self.records, self.node_count, self.source, self.sink)

    def to_instance(self) -> AssignmentInstance:
        if self.kind != "assignment":
            raise ValueError(f"not an assignment instance: kind={self.kind!r}")
        return AssignmentInstance.build(self.node_count // 2, self.records)


def serialize_max(node_count, arcs, source, sink) -> str:
    lines = [f"p max {node_count} {len(arcs)}"]
    lines.append(f"n {source + 1} s")
    lines.append(f"n {sink + 1} t")
    for tail, head, cap in arcs:
        lines.append(f"a {tail + 1} {head + 1} {cap}")
    return "\n".join(lines) + "\n"


def serialize_asn(n, edges) -> str:
    lines = [f"p asn {2 * n} {len(edges)}"]
    for x in range(n):
        lines.append(f"n {x + 1}")
    for x, y, w in edges:
        lines.append(f"a {x + 1} {n + y + 1} {w}")
    return "\n".join(lines) + "\n"


def serialize_network(net: FlowNetwork) -> str:
    """Canonical text for a FlowNetwork (forward arcs in index order)."""
    arcs = [
        (net.tail[a], net.head[a], net.capacity[a])
        for a in range(0, net.arc_count, 2)
    ]
    return serialize_max(net.node_count, arcs, net.source, net.sink)


def serialize_instance(inst: AssignmentInstance) -> str:
    """Canonical text for an AssignmentInstance (edges in stored order)."""
    return serialize_asn(inst.n, inst.edges)


def _int_token(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: expected integer, got {token!r}") from None


def _node_id(token: str, lineno: int, node_count: int) -> int:
    value = _int_token(token, lineno)
    if not (1 <= value <= node_count):
        raise ParseError(
            f"line {lineno}: node id {value} out of range 1..{node_count}"
        )
    return value - 1


def _problem_line(parts, lineno, expected, seen_before):
    if seen_before:
        raise ParseError(f"line {lineno}: duplicate problem line")
    if len(parts) != 4:
        raise ParseError(f"line {lineno}: malformed problem line")
    if parts[1] != expected:
        raise ParseError(
            f"line {lineno}: expected problem type {expected!r}, got {parts[1]!r}"
        )
    count = _int_token(parts[2], lineno)
    declared = _int_token(parts[3], lineno)
    if count < 0 or declared < 0:
        raise ParseError(f"line {lineno}: negative count on problem line")
    return count, declared


def parse_dimacs_max(text: str) -> FlowNetwork:
    """Parse a DIMACS max-flow file into a FlowNetwork (arcs in file order)."""
    node_count = None
    declared_arcs = 0
    source = None
    sink = None
    arcs: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            count, declared_arcs = _problem_line(
                parts, lineno, "max", node_count is not None
            )
            node_count = count
            continue
        if node_count is None:
            raise ParseError(f"line {lineno}: {tag!r} line before problem line")
        if tag == "n":
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: malformed node designator")
            node = _node_id(parts[1], lineno, node_count)
            which = parts[2]
            if which == "s":
                if source is not None:
                    raise ParseError(f"line {lineno}: duplicate source designator")
                source = node
            elif which == "t":
                if sink is not None:
                    raise ParseError(f"line {lineno}: duplicate sink designator")
                sink = node
            else:
                raise ParseError(
                    f"line {lineno}: node designator must be 's' or 't', got {which!r}"
                )
            if source is not None and source == sink:
                raise ParseError(f"line {lineno}: source and sink are the same node")
        elif tag == "a":
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: malformed arc line")
            tail = _node_id(parts[1], lineno, node_count)
            head = _node_id(parts[2], lineno, node_count)
            cap = _int_token(parts[3], lineno)
            if cap < 0:
                raise ParseError(f"line {lineno}: negative capacity {cap}")
            arcs.append((tail, head, cap))
        else:
            raise ParseError(f"line {lineno}: unrecognized line type {tag!r}")
    if node_count is None:
        raise ParseError("missing problem line")
    if source is None:
        raise ParseError("missing source designator")
    if sink is None:
        raise ParseError("missing sink designator")
    if len(arcs) != declared_arcs:
        raise ParseError(
            f"arc count mismatch: problem line declares {declared_arcs}, "
            f"file has {len(arcs)}"
        )
    return build_network(arcs, node_count, source, sink)


def parse_dimacs_asn(text: str) -> AssignmentInstance:
    """Parse a DIMACS assignment file into an AssignmentInstance.

    `n <id>` lines mark the X side; all other ids form the Y side.  Edge
    lines may list either endpoint first, but both must cross sides.  X and
    Y ids map to 0..n-1 in sorted order.
    """
    node_count = None
    declared_edges = 0
    x_marks: set[int] = set()
    raw_edges: list[tuple[int, int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            count, declared_edges = _problem_line(
                parts, lineno, "asn", node_count is not None
            )
            node_count = count
            continue
        if node_count is None:
            raise ParseError(f"line {lineno}: {tag!r} line before problem line")
        if tag == "n":
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: malformed node designator")
            x_marks.add(_node_id(parts[1], lineno, node_count))
        elif tag == "a":
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: malformed edge line")
            u = _node_id(parts[1], lineno, node_count)
            v = _node_id(parts[2], lineno, node_count)
            w = _int_token(parts[3], lineno)
            raw_edges.append((u, v, w, lineno))
        else:
            raise ParseError(f"line {lineno}: unrecognized line type {tag!r}")
    if node_count is None:
        raise ParseError("missing problem line")
    y_ids = sorted(set(range(node_count)) - x_marks)
    x_ids = sorted(x_marks)
    if len(x_ids) != len(y_ids):
        raise ParseError(
            f"X side has {len(x_ids)} nodes, Y side has {len(y_ids)}: "
            "sides must be the same size"
        )
    if len(raw_edges) != declared_edges:
        raise ParseError(
            f"edge count mismatch: problem line declares {declared_edges}, "
            f"file has {len(raw_edges)}"
        )
    x_index = {node: i for i, node in enumerate(x_ids)}
    y_index = {node: i for i, node in enumerate(y_ids)}
    edges: list[tuple[int, int, int]] = []
    for u, v, w, lineno in raw_edges:
        if u in x_index and v in y_index:
            edges.append((x_index[u], y_index[v], w))
        elif u in y_index and v in x_index:
            edges.append((x_index[v], y_index[u], w))
        else:
            raise ParseError(f"line {lineno}: edge endpoints on the same side")
    return AssignmentInstance.build(len(x_ids), edges)


def detect_kind(text: str) -> str:
    """Peek at the problem line to classify a file: 'maxflow' or 'assignment'."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) < 2:
                raise ParseError(f"line {lineno}: malformed problem line")
            if parts[1] == "max":
                return "maxflow"
            if parts[1] == "asn":
                return "assignment"
            raise ParseError(
                f"line {lineno}: unknown problem type {parts[1]!r}"
            )
        break
    raise ParseError("missing problem line")


def generate(
    kind: str,
    n: int,
    m_or_density=None,
    max_value: int = 100,
    rng_seed: int = 0,
) -> InstanceFile:
    """Deterministically generate a random instance for the given seed.

    maxflow: n >= 2 nodes, m_or_density is the arc count (>= 1); a random
    simple path from node 0 (source) to node n-1 (sink) guarantees
    connectivity, with path capacities in [1, max_value] and the remaining
    arcs random with capacities in [0, max_value].

    assignment: n >= 1 per side; m_or_density is None for a complete
    instance or a density in (0, 1] with a planted perfect matching keeping
    every generated instance feasible.  Weights are uniform in [0, max_value].
    """
    rng = random.Random(rng_seed)
    if kind == "maxflow":
        if n < 2:
            raise ValueError(f"maxflow generation needs n >= 2, got {n}")
        if m_or_density is None or int(m_or_density) < 1:
            raise ValueError("maxflow generation needs an arc count m >= 1")
        if max_value < 1:
            raise ValueError(f"max_value must be at least 1, got {max_value}")
        m = int(m_or_density)
        source, sink = 0, n - 1
        hops = rng.randint(0, min(n - 2, m - 1))
        path = [source] + rng.sample(range(1, n - 1), hops) + [sink]
        arcs = [
            (path[i], path[i + 1], rng.randint(1, max_value))
            for i in range(len(path) - 1)
        ]
        while len(arcs) < m:
            tail = rng.randrange(n)
            head = rng.randrange(n)
            if tail == head:
                continue
            arcs.append((tail, head, rng.randint(0, max_value)))
        return InstanceFile(
            kind="maxflow",
            node_count=n,
            records=tuple(arcs),
            source=source,
            sink=sink,
        )
    if kind == "assignment":
        if n < 1:
            raise ValueError(f"assignment generation needs n >= 1, got {n}")
        if max_value < 0:
            raise ValueError(f"max_value must be nonnegative, got {max_value}")
        if m_or_density is None:
            keep_all = True
            density = 1.0
        else:
            keep_all = False
            density = float(m_or_density)
            if not (0.0 < density <= 1.0):
                raise ValueError(f"density must be in (0, 1], got {density}")
        planted = list(range(n))
        rng.shuffle(planted)
        wanted = {(x, planted[x]) for x in range(n)}
        edges = []
        for x in range(n):
            for y in range(n):
                if keep_all or (x, y) in wanted or rng.random() < density:
                    edges.append((x, y, rng.randint(0, max_value)))
        return InstanceFile(
            kind="assignment",
            node_count=2 * n,
            records=tuple(edges),
        )
    raise ValueError(f"unknown kind {kind!r}")
