"""Port networks behind timed diagrams and cells.

A network records generator occurrences and the wires connecting their
ports, with waits and braids absorbed into the wiring.  It is the seam
between the syntactic world (diagram terms, slice terms, tilings) and the
scheduling world: the earliest-start layout rebuilt from a network is the
canonical representative of a cell modulo the braid and wait equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .signature import DoubleSignature
from .tilted import SliceTerm
from .tiling import (
    WAIT,
    BraidMark,
    Tile,
    Tiling,
    TilingError,
    WireSeg,
    assemble_tiling,
    scale_to_integer_lanes,
)


class NetworkError(Exception):
    pass


@dataclass(frozen=True)
class NetNode:
    nid: int
    gen: str
    label: str
    time: int
    in_wires: tuple[int, ...]
    out_wires: tuple[int, ...]
    in_objs: tuple[str, ...]
    out_objs: tuple[str, ...]


@dataclass(frozen=True)
class Network:
    dom: tuple[tuple[int, str], ...]  # (wire id, object) entering, top to bottom
    cod: tuple[tuple[int, str], ...]
    nodes: tuple[NetNode, ...]

    def producers(self) -> dict:
        table = {}
        for i, (w, _) in enumerate(self.dom):
            table[w] = ("dom", i)
        for n in self.nodes:
            for port, w in enumerate(n.out_wires, start=1):
                table[w] = ("node", n.nid, port)
        return table


def _split_boundary(edges):
    """Split a tilted boundary into its vertical and horizontal parts."""
    vs, hs = [], []
    seen_h = False
    for e in edges:
        if e.kind == "h":
            seen_h = True
            hs.append(e)
        else:
            if seen_h:
                return None
            vs.append(e)
    return vs, hs


def network_from_term(t: SliceTerm) -> Network:
    """Trace wires through a cell body; waits and braids vanish into wiring."""
    tokens: list = []
    dom = []
    fresh = [0]

    def new_wire(obj):
        w = fresh[0]
        fresh[0] += 1
        return w

    for e in t.dom.edges:
        if e.kind == "v":
            w = new_wire(e.name)
            dom.append((w, e.name))
            tokens.append(("v", w, e.name))
        else:
            tokens.append(("h",))

    nodes = []
    counts: dict[str, int] = {}
    for sl in t.slices:
        p = len(sl.left)
        span = len(sl.gen.dom.edges)
        seg = tokens[p:p + span]
        vs = [tok for tok in seg if tok[0] == "v"]
        if sl.gen.kind == "wait":
            rep = [("h",), vs[0]]
        elif sl.gen.kind == "braid":
            rep = [vs[1], vs[0]]
        else:
            parts = _split_boundary(sl.gen.dom.edges)
            cod_parts = _split_boundary(sl.gen.cod.edges[::-1])
            if parts is None or cod_parts is None:
                raise NetworkError(f"generator {sl.gen.name!r} is not a timed-polygraph cell")
            n_in = len(parts[0])
            time = len(parts[1])
            out_edges = [e for e in sl.gen.cod.edges if e.kind == "v"]
            if len(vs) != n_in:
                raise NetworkError(f"wire trace out of step at {sl.gen.name!r}")
            out_wires = tuple(new_wire(e.name) for e in out_edges)
            nid = len(nodes)
            label = f"{sl.gen.name}#{counts.get(sl.gen.name, 0)}"
            counts[sl.gen.name] = counts.get(sl.gen.name, 0) + 1
            nodes.append(
                NetNode(
                    nid,
                    sl.gen.name,
                    label,
                    time,
                    tuple(tok[1] for tok in vs),
                    out_wires,
                    tuple(tok[2] for tok in vs),
                    tuple(e.name for e in out_edges),
                )
            )
            rep = [("h",)] * time + [("v", w, e.name) for w, e in zip(out_wires, out_edges)]
        tokens[p:p + span] = rep

    cod = tuple((tok[1], tok[2]) for tok in tokens if tok[0] == "v")
    return Network(tuple(dom), cod, tuple(nodes))


def network_from_tiling(t: Tiling) -> Network:
    """Collapse a wired tiling to its network: waits and braids dissolve."""
    if t.wires is None:
        raise NetworkError("tiling has no wires; validate it first")
    by_dst = {}
    tile_out: dict[str, dict[int, WireSeg]] = {}
    braid_out: dict[int, dict[int, WireSeg]] = {}
    for w in t.wires:
        by_dst[w.dst] = w
        if w.src[0] == "tile":
            tile_out.setdefault(w.src[1], {})[w.src[2]] = w
        elif w.src[0] == "braid":
            braid_out.setdefault(w.src[1], {})[w.src[2]] = w
    tiles = {tile.name: tile for tile in t.tiles}

    def chase(w: WireSeg) -> tuple:
        """Follow a segment through waits and braids to its real consumer."""
        while True:
            kind = w.dst[0]
            if kind == "tile" and tiles[w.dst[1]].gen == WAIT:
                w = tile_out[w.dst[1]][1]
                continue
            if kind == "braid":
                w = braid_out[w.dst[1]][3 - w.dst[2]]
                continue
            return w.dst

    chains: dict[tuple, int] = {}
    objs: dict[int, str] = {}
    fresh = [0]

    def chain_from(w: WireSeg) -> int:
        end = chase(w)
        if end not in chains:
            chains[end] = fresh[0]
            objs[fresh[0]] = w.obj
            fresh[0] += 1
        return chains[end]

    dom = []
    for w in sorted((w for w in t.wires if w.src[0] == "W"), key=lambda w: w.src[1]):
        dom.append((chain_from(w), w.obj))
    gen_tiles = [tile for tile in t.tiles if tile.gen != WAIT]
    nodes = []
    for tile in gen_tiles:
        outs = [tile_out[tile.name][p] for p in sorted(tile_out.get(tile.name, {}))]
        out_wires = tuple(chain_from(w) for w in outs)
        nodes.append((tile, out_wires, tuple(w.obj for w in outs)))
    # Input chains resolve to ("tile", name, port) endpoints; collect them.
    in_table: dict[str, dict[int, int]] = {}
    in_objs_table: dict[str, dict[int, str]] = {}
    for end, cid in chains.items():
        if end[0] == "tile":
            in_table.setdefault(end[1], {})[end[2]] = cid
            in_objs_table.setdefault(end[1], {})[end[2]] = objs[cid]
    net_nodes = []
    for nid, (tile, out_wires, out_objs) in enumerate(nodes):
        ports = sorted(in_table.get(tile.name, {}))
        net_nodes.append(
            NetNode(
                nid,
                tile.gen,
                tile.name,
                tile.x1 - tile.x0,
                tuple(in_table[tile.name][p] for p in ports),
                out_wires,
                tuple(in_objs_table[tile.name][p] for p in ports),
                out_objs,
            )
        )
    cod = []
    for end, cid in sorted(((e, c) for e, c in chains.items() if e[0] == "E"), key=lambda x: x[0][1]):
        cod.append((cid, objs[cid]))
    return Network(tuple(dom), tuple(cod), tuple(net_nodes))


def asap_starts(net: Network) -> dict[int, int]:
    """Earliest start per node: longest weighted path from the inputs."""
    avail = {w: 0 for w, _ in net.dom}
    starts: dict[int, int] = {}
    remaining = list(net.nodes)
    while remaining:
        progressed = False
        for n in list(remaining):
            if all(w in avail for w in n.in_wires):
                s = max((avail[w] for w in n.in_wires), default=0)
                starts[n.nid] = s
                for w in n.out_wires:
                    avail[w] = s + n.time
                remaining.remove(n)
                progressed = True
        if not progressed:
            raise NetworkError("network is not acyclic")
    return starts


def network_makespan(net: Network) -> int:
    starts = asap_starts(net)
    return max((starts[n.nid] + n.time for n in net.nodes), default=0)


@dataclass
class _Slot:
    chain: int
    obj: str
    y0: Fraction
    y1: Fraction
    avail: int
    ref: tuple


def scheduled_tiling(net: Network, width: int, starts: dict[int, int] | None = None) -> Tiling:
    """Lay a network out at the given schedule (earliest starts by default),
    filling gaps with waits and gathering each node's inputs with braids at
    its start column.  The construction only looks at structure, so
    isomorphic networks produce identical tilings."""
    if starts is None:
        starts = asap_starts(net)
    for n in net.nodes:
        if not n.in_wires or not n.out_wires:
            raise NetworkError(
                f"generator {n.gen!r} has an empty interface and cannot be laid out"
            )
        if starts[n.nid] + n.time > width:
            raise NetworkError(f"node {n.label!r} does not fit in width {width}")

    tiles: list[Tile] = []
    braids: list[BraidMark] = []
    wires: list[WireSeg] = []
    counter = [0]

    def emit_wire(obj, col, y0, y1, src, dst):
        wires.append(WireSeg(counter[0], obj, col, y0, y1, src, dst))
        counter[0] += 1

    def new_tile(gen, x0, x1, y0, y1):
        name = f"t{len(tiles)}"
        tiles.append(Tile(name, gen, x0, x1, y0, y1))
        return name

    def pad(slot: _Slot, col: int):
        while slot.avail < col:
            name = new_tile(WAIT, slot.avail, slot.avail + 1, slot.y0, slot.y1)
            emit_wire(slot.obj, slot.avail, slot.y0, slot.y1, slot.ref, ("tile", name, 1))
            slot.ref = ("tile", name, 1)
            slot.avail += 1

    def swap(slots, i, col):
        """Braid the wires in slots i and i+1; spans stay with the slots."""
        a, b = slots[i], slots[i + 1]
        pad(a, col)
        pad(b, col)
        idx = len(braids)
        braids.append(BraidMark(col, a.y1, (a.obj, b.obj)))
        emit_wire(a.obj, col, a.y0, a.y1, a.ref, ("braid", idx, 1))
        emit_wire(b.obj, col, b.y0, b.y1, b.ref, ("braid", idx, 2))
        slots[i] = _Slot(b.chain, b.obj, a.y0, a.y0 + (b.y1 - b.y0), col, ("braid", idx, 1))
        slots[i + 1] = _Slot(a.chain, a.obj, a.y0 + (b.y1 - b.y0), b.y1, col, ("braid", idx, 2))

    slots: list[_Slot] = [
        _Slot(w, obj, Fraction(i), Fraction(i + 1), 0, ("W", i))
        for i, (w, obj) in enumerate(net.dom)
    ]
    height = Fraction(len(net.dom))

    remaining = list(net.nodes)
    produced = {w for w, _ in net.dom}
    while remaining:
        ready = [n for n in remaining if all(w in produced for w in n.in_wires)]
        if not ready:
            raise NetworkError("network is not acyclic")

        def position(n):
            return min(i for i, sl in enumerate(slots) if sl.chain in n.in_wires)

        node = min(ready, key=lambda n: (starts[n.nid], position(n)))
        s = starts[node.nid]
        where = {sl.chain: i for i, sl in enumerate(slots)}
        target = min(where[w] for w in node.in_wires)
        for j, w in enumerate(node.in_wires):
            cur = next(i for i, sl in enumerate(slots) if sl.chain == w)
            while cur > target + j:
                swap(slots, cur - 1, s)
                cur -= 1
        gathered = slots[target:target + len(node.in_wires)]
        for sl in gathered:
            pad(sl, s)
        y0, y1 = gathered[0].y0, gathered[-1].y1
        name = new_tile(node.gen, s, s + node.time, y0, y1)
        for port, sl in enumerate(gathered, start=1):
            emit_wire(sl.obj, s, sl.y0, sl.y1, sl.ref, ("tile", name, port))
        m = len(node.out_wires)
        step = (y1 - y0) / m
        outs = [
            _Slot(w, obj, y0 + step * i, y0 + step * (i + 1), s + node.time, ("tile", name, i + 1))
            for i, (w, obj) in enumerate(zip(node.out_wires, node.out_objs))
        ]
        slots[target:target + len(node.in_wires)] = outs
        produced.update(node.out_wires)
        remaining.remove(node)

    # Sort the surviving wires into the declared output order with final
    # braids, then pad everything out to the full width.
    want = [w for w, _ in net.cod]
    if sorted(want) != sorted(sl.chain for sl in slots):
        raise NetworkError("network outputs do not match its live wires")
    for i, w in enumerate(want):
        cur = next(j for j, sl in enumerate(slots) if sl.chain == w)
        while cur > i:
            swap(slots, cur - 1, width)
            cur -= 1
    for i, sl in enumerate(slots):
        pad(sl, width)
        emit_wire(sl.obj, width, sl.y0, sl.y1, sl.ref, ("E", i))

    return Tiling(width, height, tuple(tiles), tuple(braids), tuple(wires))


def canonical_cell(s: DoubleSignature, net: Network, width: int):
    tiling = scale_to_integer_lanes(scheduled_tiling(net, width))
    return assemble_tiling(s, tiling)


def canonical_body(s: DoubleSignature, t: SliceTerm) -> SliceTerm:
    """Canonical representative of a cell body modulo the braid and wait
    coherence equations: relayout its network at the earliest schedule."""
    from .tilted import normalize

    parts = _split_boundary(t.dom.edges)
    cod_parts = _split_boundary(tuple(reversed(t.cod.edges)))
    if parts is None or cod_parts is None:
        raise NetworkError("term boundary is not of cell shape")
    width = len(parts[1])
    net = network_from_term(t)
    cell = canonical_cell(s, net, width)
    return normalize(cell.body)
