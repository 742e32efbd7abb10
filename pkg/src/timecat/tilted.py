"""2-graphs, the tilt of a double signature, and free 2-category terms.

A 2-cell of the free 2-category is a slice term: a sequence of layers,
each holding one generator between identity whiskers.  Interchange is the
only relation; it is decided by a left-greedy normal form that bubbles
every slice as early as possible, ordering independent neighbours by
their position in the shared frontier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .signature import DoubleSignature, Edge, Path, SignatureError


class TermError(Exception):
    pass


@dataclass(frozen=True)
class CellGen:
    """A 2-cell generator between two parallel edge paths."""

    name: str
    dom: Path
    cod: Path
    kind: str = "gen"

    def __post_init__(self):
        if self.dom.start != self.cod.start or self.dom.end != self.cod.end:
            raise TermError(f"2-cell {self.name}: domain and codomain are not parallel")

    def to_json(self):
        return {
            "name": self.name,
            "dom": [edge_key(e) for e in self.dom.edges],
            "cod": [edge_key(e) for e in self.cod.edges],
            "kind": self.kind,
        }


@dataclass(frozen=True)
class TwoGraph:
    objects: tuple[str, ...]
    edges: tuple[Edge, ...]
    gens: tuple[CellGen, ...]

    def gen(self, name: str) -> CellGen:
        for g in self.gens:
            if g.name == name:
                return g
        raise TermError(f"unknown 2-cell generator {name!r}")


def tilt(s: DoubleSignature) -> TwoGraph:
    """Tilted 2-graph: 1-cells are both edge families, a cell at (u;h;k;v)
    becomes a generator from u.h to k.v."""
    gens = tuple(
        CellGen(c.name, c.u + c.h, c.k + c.v, kind=c.kind) for c in s.cells
    )
    return TwoGraph(s.objects, s.v_edges + s.h_edges, gens)


def edge_key(e: Edge) -> str:
    return f"{e.kind}:{e.name}"


@dataclass(frozen=True)
class Slice:
    left: tuple[Edge, ...]
    gen: CellGen
    right: tuple[Edge, ...]

    def to_json(self):
        return {
            "left": [edge_key(e) for e in self.left],
            "gen": self.gen.name,
            "right": [edge_key(e) for e in self.right],
        }


@dataclass(frozen=True)
class SliceTerm:
    dom: Path
    cod: Path
    slices: tuple[Slice, ...]

    def to_json(self):
        return {
            "dom": [edge_key(e) for e in self.dom.edges],
            "cod": [edge_key(e) for e in self.cod.edges],
            "slices": [s.to_json() for s in self.slices],
        }


def frontiers(t: SliceTerm) -> list[Path]:
    """All intermediate boundaries, dom first; raises if layers do not chain."""
    out = [t.dom]
    cur = t.dom
    for i, s in enumerate(t.slices):
        want = s.left + s.gen.dom.edges + s.right
        if cur.edges != want:
            raise TermError(f"slice {i} does not match its frontier")
        prefix = Path(cur.start, s.left)
        if prefix.end != s.gen.dom.start:
            raise TermError(f"slice {i}: generator anchored at the wrong object")
        cur = Path(cur.start, s.left + s.gen.cod.edges + s.right)
        out.append(cur)
    if cur.edges != t.cod.edges or cur.start != t.cod.start:
        raise TermError("final frontier does not match the declared codomain")
    return out


def check_term(t: SliceTerm) -> None:
    frontiers(t)


def identity_term(p: Path) -> SliceTerm:
    return SliceTerm(p, p, ())


def generator_term(g: CellGen) -> SliceTerm:
    return SliceTerm(g.dom, g.cod, (Slice((), g, ()),))


def compose_terms(t1: SliceTerm, t2: SliceTerm) -> SliceTerm:
    if t1.cod.edges != t2.dom.edges or t1.cod.start != t2.dom.start:
        raise TermError("cannot compose: codomain does not match domain")
    return SliceTerm(t1.dom, t2.cod, t1.slices + t2.slices)


def whisker(t: SliceTerm, left: Path, right: Path) -> SliceTerm:
    """Extend every layer by identity wires on both sides."""
    try:
        dom = left + t.dom + right
        cod = left + t.cod + right
    except SignatureError as exc:
        raise TermError(str(exc)) from exc
    slices = tuple(
        Slice(left.edges + s.left, s.gen, s.right + right.edges) for s in t.slices
    )
    return SliceTerm(dom, cod, slices)


def _swap_wanted(earlier: Slice, later: Slice) -> bool:
    """Should `later` bubble before `earlier`?  True when its footprint is
    left of the earlier slice's output block; scalar pairs sharing a
    position are ordered by generator name."""
    e = len(earlier.left)
    c_e = len(earlier.gen.cod.edges)
    l = len(later.left)
    d_l = len(later.gen.dom.edges)
    if l + d_l > e:
        return False
    scalar_pair = (
        d_l == 0
        and c_e == 0
        and l == e
        and len(later.gen.cod.edges) == 0
        and len(earlier.gen.dom.edges) == 0
    )
    if scalar_pair:
        return later.gen.name < earlier.gen.name
    return True


def _swap(frontier: Path, earlier: Slice, later: Slice) -> tuple[Slice, Slice]:
    """Exchange two independent layers; `frontier` feeds `earlier`."""
    l = len(later.left)
    d_l = len(later.gen.dom.edges)
    first = Slice(frontier.edges[:l], later.gen, frontier.edges[l + d_l:])
    mid = frontier.edges[:l] + later.gen.cod.edges + frontier.edges[l + d_l:]
    e_new = len(earlier.left) + len(later.gen.cod.edges) - d_l
    second = Slice(mid[:e_new], earlier.gen, earlier.right)
    return first, second


def normalize(t: SliceTerm) -> SliceTerm:
    """Left-greedy interchange normal form.

    Bubble passes run until no adjacent pair swaps; each swap moves a layer
    whose footprint is strictly left of its predecessor's output block.
    """
    check_term(t)
    slices = list(t.slices)
    n = len(slices)
    for _ in range(n * n + 1):
        changed = False
        fronts = frontiers(SliceTerm(t.dom, t.cod, tuple(slices)))
        for i in range(n - 1):
            if _swap_wanted(slices[i], slices[i + 1]):
                slices[i], slices[i + 1] = _swap(fronts[i], slices[i], slices[i + 1])
                changed = True
                break
        if not changed:
            return SliceTerm(t.dom, t.cod, tuple(slices))
    raise TermError("normalization did not reach a fixpoint")


def terms_equal(t1: SliceTerm, t2: SliceTerm) -> bool:
    if t1.dom.edges != t2.dom.edges or t1.dom.start != t2.dom.start:
        return False
    if t1.cod.edges != t2.cod.edges or t1.cod.start != t2.cod.start:
        return False
    return normalize(t1).slices == normalize(t2).slices


@dataclass(frozen=True)
class InterpretOps:
    identity: Callable
    compose: Callable
    whisker: Callable


def interpret(t: SliceTerm, assignment: dict, ops: InterpretOps):
    """Fold a term through callbacks: identity on the domain, then for each
    layer the whiskered generator image composed on."""
    check_term(t)
    value = ops.identity(t.dom)
    at = t.dom.start
    for s in t.slices:
        if s.gen.name not in assignment:
            raise TermError(f"no assignment for generator {s.gen.name!r}")
        left = Path(at, s.left)
        right = Path(s.gen.dom.end, s.right)
        layer = ops.whisker(assignment[s.gen.name], left, right)
        value = ops.compose(value, layer)
    return value


GRADE_OPS = InterpretOps(
    identity=lambda path: 0,
    compose=lambda a, b: a + b,
    whisker=lambda v, left, right: max(v, 0),
)


def generator_multiset(t: SliceTerm) -> dict:
    counts: dict[str, int] = {}
    for s in t.slices:
        counts[s.gen.name] = counts.get(s.gen.name, 0) + 1
    return counts
