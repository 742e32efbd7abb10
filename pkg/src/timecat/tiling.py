"""Rectangle tilings of timed diagrams and the frontier sweep.

A tiling partitions an integer box (columns are time, rows are layout
lanes) into generator and wait tiles, with zero-width braid marks on the
vertical cut lines.  Wires are the interface segments between tiles; for
user-supplied tilings they are reconstructed from the geometry (tile
corners subdivide each side into exactly as many segments as the arity),
while tilings produced by the compiler carry them explicitly.

The sweep assembles a tiling into a pinwheel cell: the frontier starts as
the west boundary followed by the south boundary and swallows one ready
tile at a time, so non-guillotine arrangements (full pinwheels) compose
fine even though no binary decomposition exists.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import lcm

from .signature import DoubleSignature, Path, braid_name, wait_name
from .tilted import CellGen, Slice, SliceTerm
from .pinwheel import PinwheelCell

WAIT = "wait"


class TilingError(Exception):
    pass


class OverlapOrGapError(TilingError):
    pass


class NonSweepableError(TilingError):
    def __init__(self, remaining):
        self.remaining = sorted(str(r) for r in remaining)
        super().__init__(f"no ready tile; remaining: {', '.join(self.remaining)}")


@dataclass(frozen=True)
class Tile:
    name: str
    gen: str  # generator name, or "wait"
    x0: int
    x1: int
    y0: Fraction | int
    y1: Fraction | int
    obj: str | None = None  # optional wait-object annotation

    @property
    def zero_width(self) -> bool:
        return self.x0 == self.x1

    def to_json(self):
        d = {"name": self.name, "gen": self.gen, "x0": self.x0, "x1": self.x1,
             "y0": _num(self.y0), "y1": _num(self.y1)}
        if self.obj is not None:
            d["obj"] = self.obj
        return d


@dataclass(frozen=True)
class BraidMark:
    col: int
    lane: Fraction | int  # y where the two swapped wires meet
    pair: tuple[str, str]

    def to_json(self):
        return {"col": self.col, "lane": _num(self.lane), "pair": list(self.pair)}


@dataclass(frozen=True)
class WireSeg:
    wid: int
    obj: str
    col: int
    y0: Fraction | int
    y1: Fraction | int
    src: tuple  # ("W", i) | ("tile", name, port) | ("braid", idx, port)
    dst: tuple  # ("E", i) | ("tile", name, port) | ("braid", idx, port)


@dataclass(frozen=True)
class Tiling:
    width: int
    height: Fraction | int
    tiles: tuple[Tile, ...]
    braids: tuple[BraidMark, ...] = ()
    wires: tuple[WireSeg, ...] | None = None

    def tile(self, name: str) -> Tile:
        for t in self.tiles:
            if t.name == name:
                return t
        raise TilingError(f"unknown tile {name!r}")

    def to_json(self):
        return {
            "box": [self.width, _num(self.height)],
            "tiles": [t.to_json() for t in sorted(self.tiles, key=lambda t: (_y(t.y0), t.x0, t.name))],
            "braids": [b.to_json() for b in self.braids],
        }


def _num(v):
    f = Fraction(v)
    if f.denominator != 1:
        raise TilingError("tiling was not scaled to integer lanes before serialization")
    return int(f)


def _y(v) -> Fraction:
    return Fraction(v)


def _cell_arity(s: DoubleSignature, gen: str):
    c = s.cell(gen)
    return list(c.u.names()), list(c.v.names()), len(c.h)


def scale_to_integer_lanes(t: Tiling) -> Tiling:
    """Multiply all lane coordinates by the least common denominator."""
    dens = [1, Fraction(t.height).denominator]
    for tile in t.tiles:
        dens += [Fraction(tile.y0).denominator, Fraction(tile.y1).denominator]
    for b in t.braids:
        dens.append(Fraction(b.lane).denominator)
    for w in t.wires or ():
        dens += [Fraction(w.y0).denominator, Fraction(w.y1).denominator]
    m = lcm(*dens)

    def s(v):
        return int(Fraction(v) * m)

    return Tiling(
        t.width,
        s(t.height),
        tuple(replace(tile, y0=s(tile.y0), y1=s(tile.y1)) for tile in t.tiles),
        tuple(replace(b, lane=s(b.lane)) for b in t.braids),
        None if t.wires is None else tuple(replace(w, y0=s(w.y0), y1=s(w.y1)) for w in t.wires),
    )


def _check_geometry(t: Tiling, reconstructing: bool) -> None:
    area = Fraction(0)
    for tile in t.tiles:
        if not (0 <= tile.x0 <= tile.x1 <= t.width) or not (0 <= _y(tile.y0) < _y(tile.y1) <= _y(t.height)):
            raise TilingError(f"tile {tile.name!r} is outside the box or degenerate")
        if reconstructing and tile.zero_width:
            raise TilingError(f"zero-width tile {tile.name!r} is not reconstructible from geometry")
        area += (tile.x1 - tile.x0) * (_y(tile.y1) - _y(tile.y0))
    solid = [tile for tile in t.tiles if not tile.zero_width]
    for i, a in enumerate(solid):
        for b in solid[i + 1:]:
            if a.x0 < b.x1 and b.x0 < a.x1 and _y(a.y0) < _y(b.y1) and _y(b.y0) < _y(a.y1):
                raise OverlapOrGapError(f"tiles {a.name!r} and {b.name!r} overlap")
    if area != t.width * _y(t.height):
        raise OverlapOrGapError(f"tiles cover area {area}, box has {t.width * _y(t.height)}")


def _segments(span0: Fraction, span1: Fraction, cuts) -> list[tuple[Fraction, Fraction]]:
    inner = sorted(c for c in cuts if span0 < c < span1)
    points = [span0] + inner + [span1]
    return list(zip(points, points[1:]))


def _reconstruct_wires(s: DoubleSignature, t: Tiling) -> tuple[WireSeg, ...]:
    """Derive the wire segments of a user tiling from corners and arities."""
    wires: list[WireSeg] = []
    counter = [0]

    def emit(obj, col, y0, y1, src, dst):
        wires.append(WireSeg(counter[0], obj, col, y0, y1, src, dst))
        counter[0] += 1

    wait_obj: dict[str, str] = {}
    for tile in t.tiles:
        if tile.gen == WAIT:
            if tile.x1 - tile.x0 != 1:
                raise TilingError(f"wait tile {tile.name!r} must be one column wide")
            if tile.obj is not None:
                wait_obj[tile.name] = tile.obj
        else:
            time = _cell_arity(s, tile.gen)[2]
            if tile.x1 - tile.x0 != time:
                raise TilingError(
                    f"tile {tile.name!r} spans {tile.x1 - tile.x0} columns but {tile.gen!r} takes {time}"
                )

    braids_by_col: dict[int, list[tuple[int, BraidMark]]] = {}
    for idx, b in enumerate(t.braids):
        braids_by_col.setdefault(b.col, []).append((idx, b))

    w_index = 0
    for c in range(t.width + 1):
        producers = sorted((x for x in t.tiles if x.x1 == c), key=lambda x: _y(x.y0))
        consumers = sorted((x for x in t.tiles if x.x0 == c), key=lambda x: _y(x.y0))
        cuts = set()
        for x in producers + consumers:
            cuts.update((_y(x.y0), _y(x.y1)))

        def outputs_of(tile):
            if tile.gen == WAIT:
                if tile.name not in wait_obj:
                    raise TilingError(f"wait tile {tile.name!r} was never fed")
                return [wait_obj[tile.name]]
            return _cell_arity(s, tile.gen)[1]

        def inputs_of(tile):
            if tile.gen == WAIT:
                return None  # any single wire; object recorded on consumption
            return _cell_arity(s, tile.gen)[0]

        # Segments sitting on this line: [y0, y1, obj, src].
        segs: list[list] = []
        if c == 0:
            for tile in consumers:
                ins = inputs_of(tile)
                if ins is None:
                    if tile.name not in wait_obj:
                        raise TilingError(
                            f"wait tile {tile.name!r} touches the west boundary; annotate its object"
                        )
                    ins = [wait_obj[tile.name]]
                parts = _segments(_y(tile.y0), _y(tile.y1), cuts)
                if len(parts) != len(ins):
                    raise TilingError(
                        f"west side of {tile.name!r} splits into {len(parts)} segments, needs {len(ins)}"
                    )
                for (y0, y1), obj in zip(parts, ins):
                    segs.append([y0, y1, obj, ("W", w_index)])
                    w_index += 1
        else:
            for tile in producers:
                outs = outputs_of(tile)
                parts = _segments(_y(tile.y0), _y(tile.y1), cuts)
                if len(parts) != len(outs):
                    raise TilingError(
                        f"east side of {tile.name!r} splits into {len(parts)} segments, needs {len(outs)}"
                    )
                for port, ((y0, y1), obj) in enumerate(zip(parts, outs), start=1):
                    segs.append([y0, y1, obj, ("tile", tile.name, port)])
        segs.sort(key=lambda r: r[0])

        for idx, mark in braids_by_col.get(c, []):
            lane = _y(mark.lane)
            hit = next(
                (i for i in range(len(segs) - 1) if segs[i][1] == lane and segs[i + 1][0] == lane),
                None,
            )
            if hit is None:
                raise TilingError(f"braid at column {c} lane {mark.lane} does not sit between two wires")
            a, b = segs[hit], segs[hit + 1]
            if (a[2], b[2]) != mark.pair:
                raise TilingError(f"braid at column {c} expects {mark.pair}, found ({a[2]}, {b[2]})")
            emit(a[2], c, a[0], a[1], a[3], ("braid", idx, 1))
            emit(b[2], c, b[0], b[1], b[3], ("braid", idx, 2))
            segs[hit] = [a[0], a[1], b[2], ("braid", idx, 1)]
            segs[hit + 1] = [b[0], b[1], a[2], ("braid", idx, 2)]

        if c < t.width:
            for tile in consumers:
                want = inputs_of(tile)
                span0, span1 = _y(tile.y0), _y(tile.y1)
                taken = sorted((r for r in segs if span0 <= r[0] and r[1] <= span1), key=lambda r: r[0])
                covered = sum(r[1] - r[0] for r in taken)
                if covered != span1 - span0:
                    raise TilingError(f"wires do not line up on the west side of {tile.name!r}")
                if want is not None and len(taken) != len(want):
                    raise TilingError(
                        f"west side of {tile.name!r} carries {len(taken)} wires, needs {len(want)}"
                    )
                if want is None:
                    if len(taken) != 1:
                        raise TilingError(f"wait tile {tile.name!r} must carry exactly one wire")
                    if tile.name in wait_obj and wait_obj[tile.name] != taken[0][2]:
                        raise TilingError(
                            f"wait tile {tile.name!r} annotated {wait_obj[tile.name]!r}, carries {taken[0][2]!r}"
                        )
                    wait_obj[tile.name] = taken[0][2]
                for port, r in enumerate(taken, start=1):
                    if want is not None and r[2] != want[port - 1]:
                        raise TilingError(
                            f"object mismatch entering {tile.name!r}: expected {want[port - 1]!r}, found {r[2]!r}"
                        )
                    emit(r[2], c, r[0], r[1], r[3], ("tile", tile.name, port))
                    segs.remove(r)
        else:
            for e_index, r in enumerate(sorted(segs, key=lambda r: r[0])):
                emit(r[2], c, r[0], r[1], r[3], ("E", e_index))
            segs = []
        if segs:
            raise TilingError(f"unconsumed wires on line {c}")
    return tuple(wires)


def validate_tiling(s: DoubleSignature, t: Tiling) -> Tiling:
    """Check the partition invariants; reconstruct wires when absent."""
    _check_geometry(t, reconstructing=t.wires is None)
    if t.wires is not None:
        return t
    return Tiling(t.width, t.height, t.tiles, t.braids, _reconstruct_wires(s, t))


def _tilt_gen(s: DoubleSignature, name: str) -> CellGen:
    c = s.cell(name)
    return CellGen(c.name, c.u + c.h, c.k + c.v, kind=c.kind)


def assemble_tiling(s: DoubleSignature, t: Tiling) -> PinwheelCell:
    """Sweep the frontier from the west+south boundary to the north+east
    boundary, emitting one slice per tile; braid marks emit braid slices.

    Ready means: the tile's input wires, in port order, followed by its
    south columns, occur contiguously on the frontier.  Ties go to the
    leftmost frontier position, then to declaration order.
    """
    if len(s.objects) != 1 or len(s.h_edges) != 1:
        raise TilingError("tilings require a drawn signature: one object, one time edge")
    t = validate_tiling(s, t)
    unit = s.h_edges[0]

    by_id = {w.wid: w for w in t.wires}
    tile_in: dict[str, list[WireSeg]] = {}
    tile_out: dict[str, list[WireSeg]] = {}
    braid_in: dict[int, list[WireSeg]] = {}
    braid_out: dict[int, list[WireSeg]] = {}
    west, east = [], []
    for w in t.wires:
        if w.src[0] == "W":
            west.append(w)
        elif w.src[0] == "tile":
            tile_out.setdefault(w.src[1], []).append(w)
        else:
            braid_out.setdefault(w.src[1], []).append(w)
        if w.dst[0] == "E":
            east.append(w)
        elif w.dst[0] == "tile":
            tile_in.setdefault(w.dst[1], []).append(w)
        else:
            braid_in.setdefault(w.dst[1], []).append(w)
    west.sort(key=lambda w: w.src[1])
    east.sort(key=lambda w: w.dst[1])
    for v in tile_in.values():
        v.sort(key=lambda w: w.dst[2])
    for v in tile_out.values():
        v.sort(key=lambda w: w.src[2])
    for v in braid_in.values():
        v.sort(key=lambda w: w.dst[2])
    for v in braid_out.values():
        v.sort(key=lambda w: w.src[2])

    def gen_for(kind, ref):
        if kind == "tile":
            tile = t.tile(ref)
            if tile.gen == WAIT:
                return _tilt_gen(s, wait_name(tile_in[ref][0].obj))
            return _tilt_gen(s, tile.gen)
        a, b = braid_in[ref][0].obj, braid_in[ref][1].obj
        return _tilt_gen(s, braid_name(a, b))

    def pattern(kind, ref):
        if kind == "tile":
            tile = t.tile(ref)
            ins = [("v", w.wid) for w in tile_in.get(ref, [])]
            return ins + [("h", c) for c in range(tile.x0, tile.x1)]
        return [("v", w.wid) for w in braid_in[ref]]

    def replacement(kind, ref):
        if kind == "tile":
            tile = t.tile(ref)
            outs = [("v", w.wid) for w in tile_out.get(ref, [])]
            return [("h", c) for c in range(tile.x0, tile.x1)] + outs
        return [("v", w.wid) for w in braid_out[ref]]

    frontier: list[tuple] = [("v", w.wid) for w in west] + [("h", c) for c in range(t.width)]
    pending = [("tile", tile.name) for tile in t.tiles] + [("braid", i) for i in range(len(t.braids))]
    slices = []

    def to_edge(item):
        kind, ref = item
        return s.v_edge(by_id[ref].obj) if kind == "v" else unit

    while pending:
        index = {item: i for i, item in enumerate(frontier)}
        best = None
        for kind, ref in pending:
            pat = pattern(kind, ref)
            if not pat:
                raise TilingError(f"{kind} {ref!r} has an empty interface")
            pos = index.get(pat[0])
            if pos is None or frontier[pos:pos + len(pat)] != pat:
                continue
            if best is None or pos < best[0]:
                best = (pos, kind, ref, pat)
        if best is None:
            raise NonSweepableError(r for _, r in pending)
        pos, kind, ref, pat = best
        pending.remove((kind, ref))
        left = tuple(to_edge(it) for it in frontier[:pos])
        right = tuple(to_edge(it) for it in frontier[pos + len(pat):])
        slices.append(Slice(left, gen_for(kind, ref), right))
        frontier = frontier[:pos] + replacement(kind, ref) + frontier[pos + len(pat):]

    want = [("h", c) for c in range(t.width)] + [("v", w.wid) for w in east]
    if frontier != want:
        raise TilingError("sweep finished on an unexpected frontier")

    obj = s.objects[0]
    u = Path(obj, tuple(s.v_edge(w.obj) for w in west))
    v = Path(obj, tuple(s.v_edge(w.obj) for w in east))
    h = Path(obj, (unit,) * t.width)
    k = Path(obj, (unit,) * t.width)
    return PinwheelCell(u, h, k, v, SliceTerm(u + h, k + v, tuple(slices)))


def _braid_spans(t: Tiling):
    """(col, ylo, yhi) of each braid crossing, None bounds when unknown."""
    spans = []
    for idx, mark in enumerate(t.braids):
        ys = [
            y
            for w in t.wires or ()
            if w.dst[0] == "braid" and w.dst[1] == idx
            for y in (_y(w.y0), _y(w.y1))
        ]
        if ys:
            spans.append((mark.col, min(ys), max(ys)))
        else:
            spans.append((mark.col, None, None))
    return spans


def is_binary_composable(t: Tiling, s: DoubleSignature | None = None) -> bool:
    """Guillotine test: can the tiling be produced by binary horizontal and
    vertical compositions alone?  Full pinwheels cannot."""
    if t.wires is None and t.braids and s is not None:
        t = validate_tiling(s, t)
    marks = _braid_spans(t)
    tiles = [(tile.x0, tile.x1, _y(tile.y0), _y(tile.y1)) for tile in t.tiles]

    def split(items, marks):
        if len(items) + len(marks) <= 1:
            return True
        xs = sorted({x for it in items for x in (it[0], it[1])} | {m[0] for m in marks})
        ys = sorted({y for it in items for y in (it[2], it[3])})
        for c in xs:
            if any(it[0] < c < it[1] for it in items):
                continue
            left = [it for it in items if it[1] <= c]
            right = [it for it in items if it[0] >= c]
            ml = [m for m in marks if m[0] < c]
            mr = [m for m in marks if m[0] > c]
            mc = [m for m in marks if m[0] == c]
            # Braids sitting on the cut line may side with either part,
            # splitting their stacking order.
            for j in range(len(mc) + 1):
                gl, gr = ml + mc[:j], mr + mc[j:]
                if not (left or gl) or not (right or gr):
                    continue
                if len(left) + len(gl) == len(items) + len(marks):
                    continue
                if split(left, gl) and split(right, gr):
                    return True
        for yc in ys:
            if any(it[2] < yc < it[3] for it in items):
                continue
            if any(m[1] is None or (m[1] < yc < m[2]) for m in marks):
                continue
            top = [it for it in items if it[3] <= yc]
            bottom = [it for it in items if it[2] >= yc]
            mt = [m for m in marks if m[2] <= yc]
            mb = [m for m in marks if m[1] >= yc]
            if not (top or mt) or not (bottom or mb):
                continue
            if split(top, mt) and split(bottom, mb):
                return True
        return False

    return split(tiles, marks)
