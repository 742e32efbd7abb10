"""Duoid-graded diagram terms over a timed polygraph.

Diagram expressions carry a grade: sequential composition adds durations,
parallel composition takes their maximum, and a regrade coerces a diagram
to a larger grade (operationally: waiting).  Diagrams compile to tilings
whose width is exactly the grade; the dependency DAG gives the makespan
oracle that grades are measured against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .duoid import Grade, par_grade, seq_grade
from .network import Network, asap_starts, canonical_cell, network_from_tiling
from .pinwheel import PinwheelCell, cells_equal
from .signature import Generator, TimedPolygraph, draw
from .tiling import WAIT, BraidMark, Tile, Tiling, WireSeg, assemble_tiling, scale_to_integer_lanes


class TypingError(Exception):
    pass


class LayoutError(Exception):
    pass


class Diagram:
    """Base class for graded diagram expressions."""

    def seq(self, other: "Diagram") -> "Diagram":
        return Seq(self, other)

    def par(self, other: "Diagram") -> "Diagram":
        return Par(self, other)


@dataclass(frozen=True)
class Gen(Diagram):
    gen: Generator


@dataclass(frozen=True)
class Id(Diagram):
    objects: tuple[str, ...]


@dataclass(frozen=True)
class Sym(Diagram):
    x: str
    y: str


@dataclass(frozen=True)
class UnitId(Diagram):
    """The special identity on the monoidal unit, graded at bottom."""


@dataclass(frozen=True)
class Seq(Diagram):
    first: Diagram
    second: Diagram


@dataclass(frozen=True)
class Par(Diagram):
    top: Diagram
    bottom: Diagram


@dataclass(frozen=True)
class Regrade(Diagram):
    inner: Diagram
    target: Grade


def wait(obj: str) -> Diagram:
    """Waiting one unit on a wire is regrading its identity."""
    return Regrade(Id((obj,)), 1)


def typecheck(d: Diagram) -> tuple[tuple[str, ...], tuple[str, ...], Grade]:
    """Boundaries and grade, or a TypingError."""
    if isinstance(d, Gen):
        return d.gen.inputs, d.gen.outputs, d.gen.time
    if isinstance(d, Id):
        return d.objects, d.objects, 0
    if isinstance(d, Sym):
        return (d.x, d.y), (d.y, d.x), 0
    if isinstance(d, UnitId):
        return (), (), 0
    if isinstance(d, Seq):
        dom1, cod1, a = typecheck(d.first)
        dom2, cod2, b = typecheck(d.second)
        if cod1 != dom2:
            raise TypingError(f"cannot compose: {cod1} does not match {dom2}")
        return dom1, cod2, seq_grade(a, b)
    if isinstance(d, Par):
        dom1, cod1, a = typecheck(d.top)
        dom2, cod2, b = typecheck(d.bottom)
        return dom1 + dom2, cod1 + cod2, par_grade(a, b)
    if isinstance(d, Regrade):
        dom, cod, a = typecheck(d.inner)
        if not a <= d.target:
            raise TypingError(f"regrade below current grade: {a} > {d.target}")
        return dom, cod, d.target
    raise TypingError(f"not a diagram: {d!r}")


def grade(d: Diagram) -> Grade:
    return typecheck(d)[2]


def diagram_generators(d: Diagram) -> list[Generator]:
    if isinstance(d, Gen):
        return [d.gen]
    if isinstance(d, (Seq, Par)):
        parts = (d.first, d.second) if isinstance(d, Seq) else (d.top, d.bottom)
        out = []
        for p in parts:
            for g in diagram_generators(p):
                if g not in out:
                    out.append(g)
        return out
    if isinstance(d, Regrade):
        return diagram_generators(d.inner)
    return []


def diagram_objects(d: Diagram) -> list[str]:
    if isinstance(d, Gen):
        return list(dict.fromkeys(d.gen.inputs + d.gen.outputs))
    if isinstance(d, Id):
        return list(dict.fromkeys(d.objects))
    if isinstance(d, Sym):
        return list(dict.fromkeys((d.x, d.y)))
    if isinstance(d, (Seq, Par)):
        parts = (d.first, d.second) if isinstance(d, Seq) else (d.top, d.bottom)
        out = []
        for p in parts:
            for x in diagram_objects(p):
                if x not in out:
                    out.append(x)
        return out
    if isinstance(d, Regrade):
        return diagram_objects(d.inner)
    return []


def implicit_polygraph(*diagrams: Diagram) -> TimedPolygraph:
    objects: list[str] = []
    gens: list[Generator] = []
    for d in diagrams:
        for x in diagram_objects(d):
            if x not in objects:
                objects.append(x)
        for g in diagram_generators(d):
            if g not in gens:
                gens.append(g)
    return TimedPolygraph(tuple(objects), tuple(gens))


@dataclass
class _Port:
    obj: str
    y0: Fraction
    y1: Fraction
    ref: tuple  # ("tile", i, port) | ("braid", i, port) | ("pass", j)


@dataclass
class _Block:
    width: int
    height: Fraction
    west: list[_Port]  # ref = consumer
    east: list[_Port]  # ref = producer
    tiles: list[list]  # [gen, x0, x1, y0, y1]
    braids: list[list]  # [col, lane, pair]
    segs: list[list]  # [col, y0, y1, obj, src, dst]


def _shift_ref(ref, dt, db):
    if ref[0] == "tile":
        return ("tile", ref[1] + dt, ref[2])
    if ref[0] == "braid":
        return ("braid", ref[1] + db, ref[2])
    return ref


def _shift_block(b: _Block, dx: int, dy: Fraction, dt: int, db: int, dwest: int, deast: int) -> _Block:
    def ref_w(ref):  # consumer refs: pass points into east
        r = _shift_ref(ref, dt, db)
        return ("pass", r[1] + deast) if r[0] == "pass" else r

    def ref_e(ref):  # producer refs: pass points into west
        r = _shift_ref(ref, dt, db)
        return ("pass", r[1] + dwest) if r[0] == "pass" else r

    return _Block(
        b.width,
        b.height,
        [_Port(p.obj, p.y0 + dy, p.y1 + dy, ref_w(p.ref)) for p in b.west],
        [_Port(p.obj, p.y0 + dy, p.y1 + dy, ref_e(p.ref)) for p in b.east],
        [[t[0], t[1] + dx, t[2] + dx, t[3] + dy, t[4] + dy] for t in b.tiles],
        [[br[0] + dx, br[1] + dy, br[2]] for br in b.braids],
        [[sg[0] + dx, sg[1] + dy, sg[2] + dy, sg[3], _shift_ref(sg[4], dt, db), _shift_ref(sg[5], dt, db)]
         for sg in b.segs],
    )


def _pad_east(b: _Block, cols: int) -> None:
    """Append wait columns on every east wire."""
    for _ in range(cols):
        for port in b.east:
            ti = len(b.tiles)
            b.tiles.append([WAIT, b.width, b.width + 1, port.y0, port.y1])
            if port.ref[0] == "pass":
                b.west[port.ref[1]].ref = ("tile", ti, 1)
            else:
                b.segs.append([b.width, port.y0, port.y1, port.obj, port.ref, ("tile", ti, 1)])
            port.ref = ("tile", ti, 1)
        b.width += 1


def _build_block(d: Diagram, west: list[tuple[str, Fraction]]) -> _Block:
    """Recursive layout; west carries (object, thickness) for each wire."""
    spans = []
    y = Fraction(0)
    for obj, th in west:
        spans.append((obj, y, y + th))
        y += th
    height = y

    if isinstance(d, Gen):
        g = d.gen
        if not g.inputs or not g.outputs:
            raise LayoutError(f"generator {g.name!r} has an empty interface; tilings need wires on both sides")
        tile = [g.name, 0, g.time, Fraction(0), height]
        wp = [_Port(obj, y0, y1, ("tile", 0, i + 1)) for i, (obj, y0, y1) in enumerate(spans)]
        step = height / len(g.outputs)
        ep = [
            _Port(obj, step * i, step * (i + 1), ("tile", 0, i + 1))
            for i, obj in enumerate(g.outputs)
        ]
        return _Block(g.time, height, wp, ep, [tile], [], [])
    if isinstance(d, Id):
        wp = [_Port(obj, y0, y1, ("pass", i)) for i, (obj, y0, y1) in enumerate(spans)]
        ep = [_Port(obj, y0, y1, ("pass", i)) for i, (obj, y0, y1) in enumerate(spans)]
        return _Block(0, height, wp, ep, [], [], [])
    if isinstance(d, UnitId):
        return _Block(0, Fraction(0), [], [], [], [], [])
    if isinstance(d, Sym):
        (ox, ax0, ax1), (oy, by0, by1) = spans
        mid = ax1
        braid = [0, mid, (ox, oy)]
        wp = [_Port(ox, ax0, ax1, ("braid", 0, 1)), _Port(oy, by0, by1, ("braid", 0, 2))]
        ep = [_Port(oy, ax0, ax1, ("braid", 0, 1)), _Port(ox, by0, by1, ("braid", 0, 2))]
        return _Block(0, height, wp, ep, [], [braid], [])
    if isinstance(d, Seq):
        b1 = _build_block(d.first, west)
        b2 = _build_block(d.second, [(p.obj, p.y1 - p.y0) for p in b1.east])
        b2 = _shift_block(b2, b1.width, Fraction(0), len(b1.tiles), len(b1.braids), 0, 0)
        out = _Block(
            b1.width + b2.width,
            b1.height,
            [_Port(p.obj, p.y0, p.y1, p.ref) for p in b1.west],
            [_Port(p.obj, p.y0, p.y1, p.ref) for p in b2.east],
            b1.tiles + b2.tiles,
            b1.braids + b2.braids,
            b1.segs + b2.segs,
        )
        for i, (e1, w2) in enumerate(zip(b1.east, b2.west)):
            if w2.ref[0] == "pass":
                out.east[w2.ref[1]].ref = e1.ref
            elif e1.ref[0] == "pass":
                out.west[e1.ref[1]].ref = w2.ref
            else:
                out.segs.append([b1.width, e1.y0, e1.y1, e1.obj, e1.ref, w2.ref])
        return out
    if isinstance(d, Par):
        n1 = len(typecheck(d.top)[0])
        b1 = _build_block(d.top, west[:n1])
        b2 = _build_block(d.bottom, west[n1:])
        w = max(b1.width, b2.width)
        _pad_east(b1, w - b1.width)
        _pad_east(b2, w - b2.width)
        b2 = _shift_block(b2, 0, b1.height, len(b1.tiles), len(b1.braids), len(b1.west), len(b1.east))
        return _Block(
            w,
            b1.height + b2.height,
            b1.west + b2.west,
            b1.east + b2.east,
            b1.tiles + b2.tiles,
            b1.braids + b2.braids,
            b1.segs + b2.segs,
        )
    if isinstance(d, Regrade):
        b = _build_block(d.inner, west)
        _pad_east(b, d.target - b.width)
        return b
    raise TypingError(f"not a diagram: {d!r}")


def to_pinwheel(d: Diagram) -> Tiling:
    """Compile a diagram to a tiling of width exactly its grade."""
    dom, _, g = typecheck(d)
    block = _build_block(d, [(obj, Fraction(1)) for obj in dom])

    names: list[str] = []
    counts: dict[str, int] = {}
    waits = 0
    for gen, *_ in block.tiles:
        if gen == WAIT:
            names.append(f"w{waits}")
            waits += 1
        else:
            names.append(f"{gen}#{counts.get(gen, 0)}")
            counts[gen] = counts.get(gen, 0) + 1

    def resolve(ref):
        if ref[0] == "tile":
            return ("tile", names[ref[1]], ref[2])
        return ref

    segs = [list(sg) for sg in block.segs]
    east_refs = [p.ref for p in block.east]
    for i, p in enumerate(block.west):
        if p.ref[0] == "pass":
            je = p.ref[1]
            east_refs[je] = ("W", i)
        else:
            segs.append([0, p.y0, p.y1, p.obj, ("W", i), p.ref])
    for j, p in enumerate(block.east):
        ref = east_refs[j]
        if ref[0] == "pass":
            raise LayoutError("unresolved pass-through wire")
        segs.append([block.width, p.y0, p.y1, p.obj, ref, ("E", j)])

    wires = tuple(
        WireSeg(i, sg[3], sg[0], sg[1], sg[2], resolve(sg[4]), resolve(sg[5]))
        for i, sg in enumerate(segs)
    )
    tiles = tuple(
        Tile(names[i], t[0], t[1], t[2], t[3], t[4]) for i, t in enumerate(block.tiles)
    )
    braids = tuple(BraidMark(br[0], br[1], br[2]) for br in block.braids)
    tiling = Tiling(block.width, block.height, tiles, braids, wires)
    assert tiling.width == g
    return scale_to_integer_lanes(tiling)


@dataclass(frozen=True)
class DagNode:
    name: str
    gen: str
    duration: Grade

    def to_json(self):
        return {"name": self.name, "gen": self.gen, "duration": self.duration}


@dataclass(frozen=True)
class DepDAG:
    nodes: tuple[DagNode, ...]
    edges: tuple[tuple[str, str], ...]

    def to_json(self):
        return {
            "nodes": [n.to_json() for n in sorted(self.nodes, key=lambda n: n.name)],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    def to_dot(self) -> str:
        lines = ["digraph dependencies {"]
        for n in sorted(self.nodes, key=lambda n: n.name):
            lines.append(f'  "{n.name}" [label="{n.name} ({n.duration})"];')
        for a, b in sorted(self.edges):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


class CycleError(Exception):
    pass


def dag_from_network(net: Network) -> DepDAG:
    by_wire = {}
    for n in net.nodes:
        for w in n.out_wires:
            by_wire[w] = n
    nodes = tuple(DagNode(n.label, n.gen, n.time) for n in net.nodes)
    edges = []
    for n in net.nodes:
        for w in n.in_wires:
            if w in by_wire:
                e = (by_wire[w].label, n.label)
                if e not in edges:
                    edges.append(e)
    return DepDAG(nodes, tuple(edges))


def to_dag(value, signature=None) -> DepDAG:
    """Dependency DAG of a diagram or a (validated or validatable) tiling."""
    if isinstance(value, Diagram):
        return dag_from_network(network_from_tiling(to_pinwheel(value)))
    if isinstance(value, Tiling):
        t = value
        if t.wires is None:
            if signature is None:
                raise LayoutError("tiling has no wires; pass the signature to validate it")
            from .tiling import validate_tiling

            t = validate_tiling(signature, t)
        return dag_from_network(network_from_tiling(t))
    raise TypingError(f"cannot build a DAG from {value!r}")


def makespan(dag: DepDAG) -> Grade:
    """Longest weighted path by topological dynamic programming; on small
    graphs the exhaustive path enumeration is cross-checked."""
    result = makespan_dp(dag)
    if len(dag.nodes) <= 24:
        assert result == makespan_by_enumeration(dag)
    return result


def makespan_dp(dag: DepDAG) -> Grade:
    dur = {n.name: n.duration for n in dag.nodes}
    preds: dict[str, list[str]] = {n.name: [] for n in dag.nodes}
    for a, b in dag.edges:
        if a not in dur or b not in dur:
            raise CycleError(f"edge ({a}, {b}) mentions an unknown node")
        preds[b].append(a)
    finish: dict[str, Grade] = {}
    pending = set(dur)
    while pending:
        moved = False
        for name in sorted(pending):
            if all(p in finish for p in preds[name]):
                finish[name] = max((finish[p] for p in preds[name]), default=0) + dur[name]
                pending.remove(name)
                moved = True
        if not moved:
            raise CycleError("dependency graph has a cycle")
    return max(finish.values(), default=0)


def makespan_by_enumeration(dag: DepDAG) -> Grade:
    """Independent oracle: walk every path explicitly."""
    dur = {n.name: n.duration for n in dag.nodes}
    succs: dict[str, list[str]] = {n.name: [] for n in dag.nodes}
    for a, b in dag.edges:
        succs[a].append(b)

    def longest_from(name, seen):
        if name in seen:
            raise CycleError("dependency graph has a cycle")
        best = 0
        for nxt in succs[name]:
            best = max(best, longest_from(nxt, seen | {name}))
        return dur[name] + best

    return max((longest_from(n.name, frozenset()) for n in dag.nodes), default=0)


def earliest_starts(dag: DepDAG) -> dict[str, Grade]:
    dur = {n.name: n.duration for n in dag.nodes}
    preds: dict[str, list[str]] = {n.name: [] for n in dag.nodes}
    for a, b in dag.edges:
        preds[b].append(a)
    starts: dict[str, Grade] = {}
    pending = set(dur)
    while pending:
        moved = False
        for name in sorted(pending):
            if all(p in starts for p in preds[name]):
                starts[name] = max((starts[p] + dur[p] for p in preds[name]), default=0)
                pending.remove(name)
                moved = True
        if not moved:
            raise CycleError("dependency graph has a cycle")
    return starts


def compile_cell(d: Diagram) -> PinwheelCell:
    """Tiling route: lay the diagram out structurally and sweep it."""
    p = implicit_polygraph(d)
    return assemble_tiling(draw(p), to_pinwheel(d))


def eq_semantic(d1: Diagram, d2: Diagram) -> bool:
    """Equality in the free graded symmetric monoidal category: same
    boundary, same grade, and the same canonical cell after the braid and
    wait equations."""
    dom1, cod1, g1 = typecheck(d1)
    dom2, cod2, g2 = typecheck(d2)
    if (dom1, cod1) != (dom2, cod2):
        raise TypingError("eq_semantic requires matching boundaries")
    if g1 != g2:
        return False
    s = draw(implicit_polygraph(d1, d2))
    c1 = canonical_cell(s, network_from_tiling(to_pinwheel(d1)), g1)
    c2 = canonical_cell(s, network_from_tiling(to_pinwheel(d2)), g2)
    return cells_equal(c1, c2)


def weak_interchange(d: Diagram) -> Diagram:
    """Rewrite Par(Seq(f,h), Seq(g,k)) to Seq(Par(f,g), Par(h,k)); the
    result's grade dominates per the lax distributivity inequality."""
    if not (isinstance(d, Par) and isinstance(d.top, Seq) and isinstance(d.bottom, Seq)):
        raise TypingError("weak interchange expects a parallel pair of sequential composites")
    f, h = d.top.first, d.top.second
    g, k = d.bottom.first, d.bottom.second
    result = Seq(Par(f, g), Par(h, k))
    typecheck(result)
    return result


@dataclass
class AxiomFailure:
    axiom: int
    detail: str


@dataclass
class AxiomReport:
    samples: int
    checked: dict[int, int]
    failures: list[AxiomFailure]

    @property
    def ok(self) -> bool:
        return not self.failures


def random_diagram(rng: random.Random, p: TimedPolygraph, depth: int = 3) -> Diagram:
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        gens = list(p.generators)
        choices = []
        if gens:
            choices.append(lambda: Gen(rng.choice(gens)))
        objs = list(p.objects)
        if objs:
            choices.append(lambda: Id(tuple(rng.choices(objs, k=rng.randint(1, 2)))))
            choices.append(lambda: Sym(rng.choice(objs), rng.choice(objs)))
        choices.append(lambda: UnitId())
        return rng.choice(choices)()
    if roll < 0.6:
        first = random_diagram(rng, p, depth - 1)
        second = random_diagram_from(rng, p, typecheck(first)[1], depth - 1)
        return Seq(first, second)
    if roll < 0.85:
        return Par(random_diagram(rng, p, depth - 1), random_diagram(rng, p, depth - 1))
    inner = random_diagram(rng, p, depth - 1)
    return Regrade(inner, grade(inner) + rng.randint(0, 2))


def random_diagram_from(rng: random.Random, p: TimedPolygraph, dom: tuple[str, ...], depth: int = 3) -> Diagram:
    """A random well-typed diagram with the given domain."""
    layers: list[Diagram] = []
    cur = dom
    for _ in range(rng.randint(0, max(depth, 0))):
        options: list[Diagram] = []
        for g in p.generators:
            n = len(g.inputs)
            for i in range(len(cur) - n + 1):
                if cur[i:i + n] == g.inputs:
                    d: Diagram = Gen(g)
                    if i > 0:
                        d = Par(Id(cur[:i]), d)
                    if i + n < len(cur):
                        d = Par(d, Id(cur[i + n:]))
                    options.append(d)
        for i in range(len(cur) - 1):
            d = Sym(cur[i], cur[i + 1])
            if i > 0:
                d = Par(Id(cur[:i]), d)
            if i + 2 < len(cur):
                d = Par(d, Id(cur[i + 2:]))
            options.append(d)
        if not options:
            break
        layer = rng.choice(options)
        layers.append(layer)
        cur = typecheck(layer)[1]
    out: Diagram = Id(dom)
    for layer in layers:
        out = Seq(out, layer)
    if rng.random() < 0.25:
        out = Regrade(out, grade(out) + rng.randint(0, 2))
    return out


def axioms_check(p: TimedPolygraph, sample_count: int, seed: int) -> AxiomReport:
    """Sample the ten graded-category axioms with randomly generated
    well-typed diagrams; grade equalities are exact, diagram equalities go
    through eq_semantic."""
    rng = random.Random(seed)
    checked = {i: 0 for i in range(1, 11)}
    failures: list[AxiomFailure] = []

    def expect(axiom: int, lhs: Diagram, rhs: Diagram):
        checked[axiom] += 1
        if not eq_semantic(lhs, rhs):
            failures.append(AxiomFailure(axiom, f"{lhs!r} != {rhs!r}"))

    for _ in range(sample_count):
        f = random_diagram(rng, p, depth=2)
        domf, codf, a = typecheck(f)
        g = random_diagram_from(rng, p, codf, depth=2)
        domg, codg, b = typecheck(g)
        h = random_diagram_from(rng, p, codg, depth=1)
        c = grade(h)
        f2 = random_diagram(rng, p, depth=2)
        a2 = grade(f2)
        g2 = random_diagram_from(rng, p, typecheck(f2)[1], depth=2)
        b2 = grade(g2)

        expect(1, Seq(f, Id(codf)), f)
        expect(1, Seq(Id(domf), f), f)
        expect(2, Seq(f, Seq(g, h)), Seq(Seq(f, g), h))
        expect(3, Par(f, Id(())), f)
        expect(3, Par(Id(()), f), f)
        z = random_diagram(rng, p, depth=1)
        expect(4, Par(f, Par(f2, z)), Par(Par(f, f2), z))
        expect(5, Regrade(f, a), f)
        mid = a + rng.randint(0, 2)
        top = mid + rng.randint(0, 2)
        expect(6, Regrade(f, top), Regrade(Regrade(f, mid), top))
        expect(
            7,
            Seq(Regrade(f, a + 1), Regrade(g, b + 2)),
            Regrade(Seq(f, g), a + 1 + b + 2),
        )
        expect(
            8,
            Par(Regrade(f, a + 1), Regrade(f2, a2 + 2)),
            Regrade(Par(f, f2), max(a + 1, a2 + 2)),
        )
        lhs9 = Par(Seq(f, g), Seq(f2, g2))
        rhs9 = Seq(Par(f, f2), Par(g, g2))
        target9 = seq_grade(par_grade(a, a2), par_grade(b, b2))
        expect(9, Regrade(lhs9, target9), rhs9)
        expect(10, Regrade(UnitId(), 0), Id(()))
    return AxiomReport(sample_count, checked, failures)
