"""Timed polygraphs, double signatures, their morphisms, and draw().

A timed polygraph declares objects and duration-annotated generators.
draw() turns it into a double signature over a single object: one shared
horizontal edge (a unit of time), one vertical edge per object, a cell per
generator, a unit-wait cell per object and a braiding cell per ordered
object pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .duoid import Grade

UNIT_EDGE = "1"
STAR = "*"


class SignatureError(Exception):
    pass


@dataclass(frozen=True)
class Edge:
    """A 1-cell: a named edge with endpoints, tagged vertical or horizontal."""

    name: str
    src: str
    dst: str
    kind: str  # "v" | "h"

    def to_json(self):
        return {"name": self.name, "src": self.src, "dst": self.dst, "kind": self.kind}


@dataclass(frozen=True)
class Path:
    """An edge list with an anchor, so the empty path at an object exists."""

    start: str
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        at = self.start
        for e in self.edges:
            if e.src != at:
                raise SignatureError(f"path breaks at edge {e.name}: expected source {at}")
            at = e.dst

    @property
    def end(self) -> str:
        return self.edges[-1].dst if self.edges else self.start

    def __len__(self) -> int:
        return len(self.edges)

    def __add__(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise SignatureError(f"paths do not compose: {self.end} != {other.start}")
        return Path(self.start, self.edges + other.edges)

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.edges)

    def to_json(self):
        return {"start": self.start, "edges": list(self.names())}


@dataclass(frozen=True)
class Generator:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    time: Grade

    def to_json(self):
        return {
            "name": self.name,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "time": self.time,
        }


@dataclass(frozen=True)
class TimedPolygraph:
    objects: tuple[str, ...]
    generators: tuple[Generator, ...]

    def generator(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise SignatureError(f"unknown generator {name!r}")

    def has_generator(self, name: str) -> bool:
        return any(g.name == name for g in self.generators)

    def to_json(self):
        return {
            "objects": sorted(self.objects),
            "generators": [g.to_json() for g in sorted(self.generators, key=lambda g: g.name)],
        }


def validate_polygraph(p: TimedPolygraph) -> list[str]:
    """Return a list of problems; empty iff the polygraph is well-formed."""
    problems = []
    seen_objs = set()
    for x in p.objects:
        if x in seen_objs:
            problems.append(f"duplicate object {x!r}")
        seen_objs.add(x)
    seen = set()
    for g in p.generators:
        if g.name in seen:
            problems.append(f"duplicate generator name {g.name!r}")
        seen.add(g.name)
        for x in g.inputs + g.outputs:
            if x not in seen_objs:
                problems.append(f"unknown object {x!r} in generator {g.name!r}")
        if g.time < 0:
            problems.append(f"negative time in generator {g.name!r}")
    return problems


@dataclass(frozen=True)
class CellDecl:
    """A cell generator at a boundary quadruple (u; h; k; v)."""

    name: str
    u: Path
    h: Path
    k: Path
    v: Path
    kind: str = "gen"  # "gen" | "wait" | "braid"

    def __post_init__(self):
        # Composability per the square: u: X->Y, h: Y->W, k: X->Z, v: Z->W.
        if self.u.start != self.k.start:
            raise SignatureError(f"cell {self.name}: u and k must share a source")
        if self.u.end != self.h.start:
            raise SignatureError(f"cell {self.name}: h must start where u ends")
        if self.k.end != self.v.start:
            raise SignatureError(f"cell {self.name}: v must start where k ends")
        if self.h.end != self.v.end:
            raise SignatureError(f"cell {self.name}: h and v must share a target")

    @property
    def boundary(self):
        return (self.u.names(), self.h.names(), self.k.names(), self.v.names())

    def to_json(self):
        return {
            "name": self.name,
            "u": self.u.to_json(),
            "h": self.h.to_json(),
            "k": self.k.to_json(),
            "v": self.v.to_json(),
            "kind": self.kind,
        }


@dataclass(frozen=True)
class DoubleSignature:
    objects: tuple[str, ...]
    h_edges: tuple[Edge, ...]
    v_edges: tuple[Edge, ...]
    cells: tuple[CellDecl, ...]

    def __post_init__(self):
        objs = set(self.objects)
        for e in self.h_edges + self.v_edges:
            if e.src not in objs or e.dst not in objs:
                raise SignatureError(f"edge {e.name} has endpoints outside the object set")
        names = set()
        for c in self.cells:
            if c.name in names:
                raise SignatureError(f"duplicate cell name {c.name!r}")
            names.add(c.name)

    def cell(self, name: str) -> CellDecl:
        for c in self.cells:
            if c.name == name:
                return c
        raise SignatureError(f"unknown cell {name!r}")

    def h_edge(self, name: str) -> Edge:
        for e in self.h_edges:
            if e.name == name:
                return e
        raise SignatureError(f"unknown horizontal edge {name!r}")

    def v_edge(self, name: str) -> Edge:
        for e in self.v_edges:
            if e.name == name:
                return e
        raise SignatureError(f"unknown vertical edge {name!r}")

    def to_json(self):
        return {
            "objects": sorted(self.objects),
            "h_edges": [e.to_json() for e in sorted(self.h_edges, key=lambda e: e.name)],
            "v_edges": [e.to_json() for e in sorted(self.v_edges, key=lambda e: e.name)],
            "cells": [c.to_json() for c in sorted(self.cells, key=lambda c: c.name)],
        }


def wait_name(obj: str) -> str:
    return f"wait:{obj}"


def braid_name(x: str, y: str) -> str:
    return f"sym:{x}:{y}"


def draw(p: TimedPolygraph) -> DoubleSignature:
    """Double signature of a timed polygraph: one object, one time edge.

    Cells: one per generator at (inputs; 1^t; 1^t; outputs), a wait cell per
    object at (X; 1; 1; X), and a braiding cell per ordered object pair at
    (X,Y; ; ; Y,X).  Reserved cell names use ':' so they can never collide
    with user generator names.
    """
    problems = validate_polygraph(p)
    if problems:
        raise SignatureError("; ".join(problems))
    unit = Edge(UNIT_EDGE, STAR, STAR, "h")
    v_edges = {x: Edge(x, STAR, STAR, "v") for x in p.objects}

    def vpath(objs):
        return Path(STAR, tuple(v_edges[x] for x in objs))

    def hpath(t):
        return Path(STAR, (unit,) * t)

    cells = []
    for g in p.generators:
        cells.append(CellDecl(g.name, vpath(g.inputs), hpath(g.time), hpath(g.time), vpath(g.outputs)))
    for x in sorted(p.objects):
        cells.append(CellDecl(wait_name(x), vpath([x]), hpath(1), hpath(1), vpath([x]), kind="wait"))
    for x in sorted(p.objects):
        for y in sorted(p.objects):
            cells.append(
                CellDecl(braid_name(x, y), vpath([x, y]), hpath(0), hpath(0), vpath([y, x]), kind="braid")
            )
    return DoubleSignature((STAR,), (unit,), tuple(v_edges.values()), tuple(cells))


@dataclass(frozen=True)
class PolygraphMorphism:
    obj_map: dict
    gen_map: dict

    def apply(self, p: TimedPolygraph, target: TimedPolygraph) -> TimedPolygraph:
        """Image of p in target; rejects maps that break time or boundaries."""
        for x in p.objects:
            if x not in self.obj_map or self.obj_map[x] not in target.objects:
                raise SignatureError(f"object map not defined into target at {x!r}")
        for g in p.generators:
            if g.name not in self.gen_map:
                raise SignatureError(f"generator map undefined at {g.name!r}")
            img = target.generator(self.gen_map[g.name])
            if img.time != g.time:
                raise SignatureError(f"morphism changes time of {g.name!r}")
            if img.inputs != tuple(self.obj_map[x] for x in g.inputs):
                raise SignatureError(f"morphism breaks inputs of {g.name!r}")
            if img.outputs != tuple(self.obj_map[x] for x in g.outputs):
                raise SignatureError(f"morphism breaks outputs of {g.name!r}")
        objs = []
        for x in p.objects:
            if self.obj_map[x] not in objs:
                objs.append(self.obj_map[x])
        gens = []
        for g in p.generators:
            img = target.generator(self.gen_map[g.name])
            if img not in gens:
                gens.append(img)
        return TimedPolygraph(tuple(objs), tuple(gens))


def apply_polygraph_morphism(m: PolygraphMorphism, p: TimedPolygraph, target: TimedPolygraph) -> TimedPolygraph:
    return m.apply(p, target)


@dataclass(frozen=True)
class SignatureMorphism:
    """Maps of objects, edges and cells; cell images may be cells of a
    concrete signature (by name) or pinwheel cells (for the monad unit)."""

    obj_map: dict
    h_map: dict
    v_map: dict
    cell_map: dict = field(default_factory=dict)


def _map_path(m: SignatureMorphism, path: Path, edge_lookup) -> Path:
    edges = []
    for e in path.edges:
        table = m.h_map if e.kind == "h" else m.v_map
        if e.name not in table:
            raise SignatureError(f"edge map undefined at {e.name!r}")
        edges.append(edge_lookup(table[e.name], e.kind))
    return Path(m.obj_map[path.start], tuple(edges))


def apply_signature_morphism(m: SignatureMorphism, s: DoubleSignature, target: DoubleSignature) -> DoubleSignature:
    """Image of s under m inside target; checks boundary preservation."""

    def lookup(name, kind):
        return target.h_edge(name) if kind == "h" else target.v_edge(name)

    for x in s.objects:
        if x not in m.obj_map or m.obj_map[x] not in target.objects:
            raise SignatureError(f"object map not defined into target at {x!r}")
    cells = []
    for c in s.cells:
        if c.name not in m.cell_map:
            raise SignatureError(f"cell map undefined at {c.name!r}")
        img = target.cell(m.cell_map[c.name])
        want = (
            _map_path(m, c.u, lookup).names(),
            _map_path(m, c.h, lookup).names(),
            _map_path(m, c.k, lookup).names(),
            _map_path(m, c.v, lookup).names(),
        )
        if img.boundary != want:
            raise SignatureError(
                f"cell map breaks the boundary of {c.name!r}: image has {img.boundary}, expected {want}"
            )
        if img not in cells:
            cells.append(img)
    objs = tuple(dict.fromkeys(m.obj_map[x] for x in s.objects))
    h_edges = tuple(dict.fromkeys(lookup(m.h_map[e.name], "h") for e in s.h_edges))
    v_edges = tuple(dict.fromkeys(lookup(m.v_map[e.name], "v") for e in s.v_edges))
    return DoubleSignature(objs, h_edges, v_edges, tuple(cells))


def draw_morphism(m: PolygraphMorphism, p: TimedPolygraph) -> SignatureMorphism:
    """Functorial action of draw on a polygraph morphism."""
    cell_map = {}
    for g in p.generators:
        cell_map[g.name] = m.gen_map[g.name]
    for x in p.objects:
        cell_map[wait_name(x)] = wait_name(m.obj_map[x])
    for x in p.objects:
        for y in p.objects:
            cell_map[braid_name(x, y)] = braid_name(m.obj_map[x], m.obj_map[y])
    return SignatureMorphism(
        obj_map={STAR: STAR},
        h_map={UNIT_EDGE: UNIT_EDGE},
        v_map={x: m.obj_map[x] for x in p.objects},
        cell_map=cell_map,
    )
