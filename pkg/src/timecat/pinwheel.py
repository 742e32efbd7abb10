"""Pinwheel double-category cells over a tilted signature.

A cell (u; h; k; v) is realized by a slice term whose domain is u.h and
whose codomain is k.v.  Horizontal and vertical composition whisker the
two bodies so the shared boundary lines up; the monad structure
substitutes cells for generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .duoid import Grade
from .signature import DoubleSignature, Path
from .tilted import (
    CellGen,
    Slice,
    SliceTerm,
    TermError,
    check_term,
    compose_terms,
    generator_term,
    identity_term,
    normalize,
    terms_equal,
    tilt,
    whisker,
)


class CellError(Exception):
    pass


class SkewCellError(CellError):
    pass


@dataclass(frozen=True)
class PinwheelCell:
    u: Path  # left boundary, top to bottom
    h: Path  # bottom boundary, left to right
    k: Path  # top boundary
    v: Path  # right boundary
    body: SliceTerm

    def __post_init__(self):
        dom = self.u + self.h
        cod = self.k + self.v
        if self.body.dom.edges != dom.edges or self.body.dom.start != dom.start:
            raise CellError("cell body domain does not equal u.h")
        if self.body.cod.edges != cod.edges or self.body.cod.start != cod.start:
            raise CellError("cell body codomain does not equal k.v")
        check_term(self.body)

    def to_json(self):
        return {
            "u": self.u.to_json(),
            "h": self.h.to_json(),
            "k": self.k.to_json(),
            "v": self.v.to_json(),
            "body": self.body.to_json(),
        }


def cell_from_generator(s: DoubleSignature, name: str) -> PinwheelCell:
    """One-slice cell holding exactly the named generator of s."""
    c = s.cell(name)
    gen = CellGen(c.name, c.u + c.h, c.k + c.v, kind=c.kind)
    return PinwheelCell(c.u, c.h, c.k, c.v, generator_term(gen))


def identity_cell_h(u: Path) -> PinwheelCell:
    return PinwheelCell(u, Path(u.end), Path(u.start), u, identity_term(u))


def identity_cell_v(k: Path) -> PinwheelCell:
    return PinwheelCell(Path(k.start), k, k, Path(k.end), identity_term(k))


def hcompose(a: PinwheelCell, b: PinwheelCell) -> PinwheelCell:
    """Compose side by side: a's right boundary must be b's left boundary."""
    if a.v.edges != b.u.edges or a.v.start != b.u.start:
        raise CellError("hcompose: right boundary of a does not match left boundary of b")
    body = compose_terms(
        whisker(a.body, Path(a.u.start), b.h),
        whisker(b.body, a.k, Path(b.v.end)),
    )
    return PinwheelCell(a.u, a.h + b.h, a.k + b.k, b.v, body)


def vcompose(a: PinwheelCell, d: PinwheelCell) -> PinwheelCell:
    """Stack a on top of d: a's bottom boundary must be d's top boundary."""
    if a.h.edges != d.k.edges or a.h.start != d.k.start:
        raise CellError("vcompose: bottom boundary of a does not match top boundary of d")
    body = compose_terms(
        whisker(d.body, a.u, Path(d.h.end)),
        whisker(a.body, Path(a.u.start), d.v),
    )
    return PinwheelCell(a.u + d.u, d.h, a.k, a.v + d.v, body)


def duration(c: PinwheelCell) -> Grade:
    """Width of a cell in time units; rejects skew cells."""
    if len(c.h) != len(c.k):
        raise SkewCellError(f"skew cell: bottom length {len(c.h)} != top length {len(c.k)}")
    return len(c.h)


def cells_equal(a: PinwheelCell, b: PinwheelCell) -> bool:
    return (
        a.u.names() == b.u.names()
        and a.h.names() == b.h.names()
        and a.k.names() == b.k.names()
        and a.v.names() == b.v.names()
        and terms_equal(a.body, b.body)
    )


def is_cell_at(s: DoubleSignature, c: PinwheelCell, boundary) -> bool:
    """Membership query for forget(pinwheel(s)): is c a cell of pinwheel(s)
    at the given (u, h, k, v) name quadruple?"""
    u, h, k, v = boundary
    if (c.u.names(), c.h.names(), c.k.names(), c.v.names()) != (
        tuple(u),
        tuple(h),
        tuple(k),
        tuple(v),
    ):
        return False
    graph = tilt(s)
    try:
        for sl in c.body.slices:
            if graph.gen(sl.gen.name) != sl.gen:
                return False
        check_term(c.body)
    except TermError:
        return False
    return True


@dataclass(frozen=True)
class KleisliMap:
    """A signature morphism into forget(pinwheel(target)).

    Edges map to paths of the target; cells map to pinwheel cells over the
    target.  The monad unit is the identity-on-edges map sending every cell
    to its one-slice embedding.
    """

    target: DoubleSignature
    obj_map: dict
    v_map: dict  # v-edge name -> Path over target
    h_map: dict  # h-edge name -> Path over target
    cells: dict  # cell name -> PinwheelCell over target

    def map_path(self, p: Path) -> Path:
        out = Path(self.obj_map[p.start])
        for e in p.edges:
            table = self.h_map if e.kind == "h" else self.v_map
            if e.name not in table:
                raise CellError(f"edge map undefined at {e.name!r}")
            out = out + table[e.name]
        return out


def pinwheel_unit(s: DoubleSignature) -> KleisliMap:
    """Monad unit: each generator becomes the singleton cell on itself."""
    return KleisliMap(
        target=s,
        obj_map={x: x for x in s.objects},
        v_map={e.name: Path(e.src, (e,)) for e in s.v_edges},
        h_map={e.name: Path(e.src, (e,)) for e in s.h_edges},
        cells={c.name: cell_from_generator(s, c.name) for c in s.cells},
    )


def flatten(s: DoubleSignature, c: PinwheelCell, substitution: KleisliMap) -> PinwheelCell:
    """Monad multiplication: replace each layer's generator by the whiskered
    body of its image cell.  The substitution must preserve boundaries."""
    if substitution.target != s:
        raise CellError("substitution does not target the given signature")
    u = substitution.map_path(c.u)
    h = substitution.map_path(c.h)
    k = substitution.map_path(c.k)
    v = substitution.map_path(c.v)
    body = identity_term(u + h)
    start = c.body.dom.start
    for sl in c.body.slices:
        if sl.gen.name not in substitution.cells:
            raise CellError(f"substitution undefined at generator {sl.gen.name!r}")
        image = substitution.cells[sl.gen.name]
        img_dom = image.u + image.h
        img_cod = image.k + image.v
        want_dom = substitution.map_path(sl.gen.dom)
        want_cod = substitution.map_path(sl.gen.cod)
        if img_dom.edges != want_dom.edges or img_cod.edges != want_cod.edges:
            raise CellError(f"substitution breaks the boundary of {sl.gen.name!r}")
        left = substitution.map_path(Path(start, sl.left))
        right = substitution.map_path(Path(sl.gen.dom.end, sl.right))
        body = compose_terms(body, whisker(image.body, left, right))
    return PinwheelCell(u, h, k, v, body)


def compose_kleisli(first: KleisliMap, second: KleisliMap) -> KleisliMap:
    """Kleisli composition: map edges through both, flatten cell images."""
    return KleisliMap(
        target=second.target,
        obj_map={x: second.obj_map[y] for x, y in first.obj_map.items()},
        v_map={n: second.map_path(p) for n, p in first.v_map.items()},
        h_map={n: second.map_path(p) for n, p in first.h_map.items()},
        cells={n: flatten(second.target, cell, second) for n, cell in first.cells.items()},
    )


@dataclass(frozen=True)
class RewriteRule:
    """An oriented rewrite with a declared strictly decreasing measure."""

    name: str
    measure: Callable[[SliceTerm], tuple]
    step: Callable[[SliceTerm], SliceTerm | None]


class RuleError(Exception):
    pass


def _is_braid(g: CellGen) -> bool:
    return g.kind == "braid"


def _is_wait(g: CellGen) -> bool:
    return g.kind == "wait"


def _sigma_cancel_step(t: SliceTerm) -> SliceTerm | None:
    t = normalize(t)
    for i in range(len(t.slices) - 1):
        a, b = t.slices[i], t.slices[i + 1]
        if not (_is_braid(a.gen) and _is_braid(b.gen)):
            continue
        if len(a.left) != len(b.left):
            continue
        if a.gen.cod.edges != b.gen.dom.edges or a.gen.dom.edges != b.gen.cod.edges:
            continue
        return SliceTerm(t.dom, t.cod, t.slices[:i] + t.slices[i + 2:])
    return None


SIGMA_CANCEL = RewriteRule(
    name="braid-involution",
    measure=lambda t: (len(t.slices),),
    step=_sigma_cancel_step,
)


def _braid_name(prefix_source: str, x: str, y: str) -> str:
    prefix = prefix_source.split(":", 1)[0]
    return f"{prefix}:{x}:{y}"


def _braid_naturality_step(t: SliceTerm) -> SliceTerm | None:
    """Slide a braid before the adjacent unary generator feeding it."""
    for i in range(len(t.slices) - 1):
        a, b = t.slices[i], t.slices[i + 1]
        if _is_braid(a.gen) or not _is_braid(b.gen):
            continue
        if len(a.gen.dom.edges) != 1 or len(a.gen.cod.edges) != 1:
            continue
        p = len(a.left)
        q = len(b.left)
        in_edge = a.gen.dom.edges[0]
        out_edge = a.gen.cod.edges[0]
        if q == p and b.gen.dom.edges[0] == out_edge:
            # generator output is the upper strand of the braid
            other = b.gen.dom.edges[1]
            braid = CellGen(
                _braid_name(b.gen.name, in_edge.name, other.name),
                Path(b.gen.dom.start, (in_edge, other)),
                Path(b.gen.cod.start, (other, in_edge)),
                kind="braid",
            )
            first = Slice(a.left, braid, a.right[1:])
            second = Slice(a.left + (other,), a.gen, a.right[1:])
        elif q == p - 1 and b.gen.dom.edges[1] == out_edge:
            # generator output is the lower strand of the braid
            other = b.gen.dom.edges[0]
            braid = CellGen(
                _braid_name(b.gen.name, other.name, in_edge.name),
                Path(b.gen.dom.start, (other, in_edge)),
                Path(b.gen.cod.start, (in_edge, other)),
                kind="braid",
            )
            first = Slice(a.left[:-1], braid, a.right)
            second = Slice(a.left[:-1], a.gen, (other,) + a.right)
        else:
            continue
        candidate = SliceTerm(t.dom, t.cod, t.slices[:i] + (first, second) + t.slices[i + 2:])
        try:
            check_term(candidate)
        except TermError:
            continue
        return candidate
    return None


def _gens_before_braids(t: SliceTerm) -> tuple:
    total = 0
    gens_seen = 0
    for sl in t.slices:
        if _is_braid(sl.gen):
            total += gens_seen
        elif not _is_wait(sl.gen):
            gens_seen += 1
    return (total,)


BRAID_NATURALITY = RewriteRule(
    name="braid-naturality",
    measure=_gens_before_braids,
    step=_braid_naturality_step,
)


def canonical_bundle(s: DoubleSignature) -> RewriteRule:
    """Joint realization of the braid and wait coherence equations: rebuild
    the body from its port network at the earliest possible schedule.  This
    single pass covers Yang-Baxter and the wait slides."""

    def step(t: SliceTerm) -> SliceTerm | None:
        from .network import canonical_body

        canon = canonical_body(s, t)
        if normalize(t).slices == canon.slices:
            return None
        return canon

    return RewriteRule(
        name="canonical-form",
        measure=lambda t: (0 if step(t) is None else 1,),
        step=step,
    )


def default_rules(s: DoubleSignature) -> list[RewriteRule]:
    """The default quotient is the canonical bundle alone: it realizes the
    braid involution, braid naturality, Yang-Baxter and the wait slides in
    one terminating pass.  SIGMA_CANCEL and BRAID_NATURALITY remain
    available as standalone local rules."""
    return [canonical_bundle(s)]


def apply_quotient_rewrites(c: PinwheelCell, rules: list[RewriteRule]) -> PinwheelCell:
    """Exhaustively apply oriented rewrites to the cell body, then normalize.

    Every rule must declare a measure; each application is checked to
    strictly decrease it.  A repeated-state guard rejects rule sets that
    cycle through each other's measures.
    """
    for rule in rules:
        if rule.measure is None:
            raise RuleError(f"rule {rule.name!r} declares no decreasing measure")
    body = c.body
    seen = {body.slices}
    progress = True
    while progress:
        progress = False
        for rule in rules:
            before = rule.measure(body)
            nxt = rule.step(body)
            if nxt is None:
                continue
            after = rule.measure(nxt)
            if not after < before:
                raise RuleError(f"rule {rule.name!r} did not decrease its measure")
            body = nxt
            if body.slices in seen:
                raise RuleError("rule set does not terminate jointly")
            seen.add(body.slices)
            progress = True
            break
    return PinwheelCell(c.u, c.h, c.k, c.v, normalize(body))
