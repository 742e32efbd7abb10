"""The .tpg theory-file format: parser and canonical printer.

Line-oriented declarations:

    obj NAME+
    gen NAME : OBJ* -> OBJ* @ NAT
    diag NAME = EXPR
    tiling NAME { tile NAME : GEN rect X0..X1 x Y0..Y1 ; braid at COL lane LANE (OBJ, OBJ) }

Expressions:  NAME | id OBJ | swap OBJ OBJ | wait OBJ | EXPR ; EXPR
            | EXPR * EXPR | up(EXPR, NAT) | (EXPR)
with ';' binding looser than '*'.  In tilings GEN may also be `wait`,
optionally annotated with its object (`wait X`), which is required when a
wait touches the west boundary.  '#' starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graded import Diagram, Gen, Id, Par, Regrade, Seq, Sym, typecheck, wait
from .signature import Generator, TimedPolygraph, validate_polygraph
from .tiling import BraidMark, Tile, Tiling


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass
class TheoryFile:
    polygraph: TimedPolygraph
    diagrams: dict[str, Diagram] = field(default_factory=dict)
    tilings: dict[str, Tiling] = field(default_factory=dict)

    def resolve(self, name: str):
        if name in self.diagrams:
            return self.diagrams[name]
        if name in self.tilings:
            return self.tilings[name]
        raise KeyError(f"no diagram or tiling named {name!r}")


_SYMBOLS = ("->", "..", ":", "=", ";", "*", "(", ")", ",", "{", "}", "@")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "name" | "nat" | symbol text | "eol" | "eof"
    text: str
    line: int
    col: int


def _lex(source: str) -> list[_Tok]:
    toks = []
    for ln, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        i = 0
        while i < len(line):
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            for sym in _SYMBOLS:
                if line.startswith(sym, i):
                    toks.append(_Tok(sym, sym, ln, i + 1))
                    i += len(sym)
                    break
            else:
                if ch.isdigit():
                    j = i
                    while j < len(line) and line[j].isdigit():
                        j += 1
                    toks.append(_Tok("nat", line[i:j], ln, i + 1))
                    i = j
                elif ch.isalpha() or ch == "_":
                    j = i
                    while j < len(line) and (line[j].isalnum() or line[j] == "_"):
                        j += 1
                    toks.append(_Tok("name", line[i:j], ln, i + 1))
                    i = j
                else:
                    raise ParseError(f"unexpected character {ch!r}", ln, i + 1)
        toks.append(_Tok("eol", "", ln, len(raw) + 1))
    toks.append(_Tok("eof", "", len(source.splitlines()) + 1, 1))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self, offset=0) -> _Tok:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def skip_eol(self):
        while self.peek().kind == "eol":
            self.next()

    def expect(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or tok.kind!r}", tok.line, tok.col)
        return tok

    def expect_name(self, what="a name") -> _Tok:
        tok = self.next()
        if tok.kind != "name":
            raise ParseError(f"expected {what}, found {tok.text or tok.kind!r}", tok.line, tok.col)
        return tok

    def expect_nat(self) -> int:
        tok = self.next()
        if tok.kind != "nat":
            raise ParseError(f"expected a number, found {tok.text or tok.kind!r}", tok.line, tok.col)
        return int(tok.text)


def parse(source: str) -> TheoryFile:
    p = _Parser(_lex(source))
    objects: list[str] = []
    generators: list[Generator] = []
    diagrams: dict[str, Diagram] = {}
    tilings: dict[str, Tiling] = {}

    def known(obj_tok: _Tok) -> str:
        if obj_tok.text not in objects:
            raise ParseError(f"unknown object {obj_tok.text!r}", obj_tok.line, obj_tok.col)
        return obj_tok.text

    while True:
        p.skip_eol()
        tok = p.peek()
        if tok.kind == "eof":
            break
        if tok.kind != "name":
            raise ParseError(f"expected a declaration, found {tok.text or tok.kind!r}", tok.line, tok.col)
        if tok.text == "obj":
            p.next()
            while p.peek().kind == "name":
                objects.append(p.next().text)
            p.expect("eol")
        elif tok.text == "gen":
            p.next()
            name = p.expect_name("a generator name").text
            p.expect(":")
            ins = []
            while p.peek().kind == "name":
                ins.append(known(p.next()))
            p.expect("->")
            outs = []
            while p.peek().kind == "name":
                outs.append(known(p.next()))
            p.expect("@")
            time = p.expect_nat()
            generators.append(Generator(name, tuple(ins), tuple(outs), time))
            p.expect("eol")
        elif tok.text == "diag":
            p.next()
            name = p.expect_name("a diagram name").text
            p.expect("=")
            poly = TimedPolygraph(tuple(objects), tuple(generators))
            d = _parse_expr(p, poly, diagrams)
            try:
                typecheck(d)
            except Exception as exc:
                raise ParseError(f"diagram {name!r} does not typecheck: {exc}", tok.line, tok.col)
            diagrams[name] = d
            p.expect("eol")
        elif tok.text == "tiling":
            p.next()
            name = p.expect_name("a tiling name").text
            tilings[name] = _parse_tiling(p, objects, generators)
        else:
            raise ParseError(f"unknown declaration {tok.text!r}", tok.line, tok.col)

    poly = TimedPolygraph(tuple(objects), tuple(generators))
    problems = validate_polygraph(poly)
    if problems:
        raise ParseError("; ".join(problems), 1, 1)
    return TheoryFile(poly, diagrams, tilings)


def _parse_expr(p: _Parser, poly: TimedPolygraph, diagrams) -> Diagram:
    return _parse_seq(p, poly, diagrams)


def _parse_seq(p: _Parser, poly, diagrams) -> Diagram:
    left = _parse_par(p, poly, diagrams)
    while p.peek().kind == ";":
        p.next()
        right = _parse_par(p, poly, diagrams)
        left = Seq(left, right)
    return left


def _parse_par(p: _Parser, poly, diagrams) -> Diagram:
    left = _parse_atom(p, poly, diagrams)
    while p.peek().kind == "*":
        p.next()
        right = _parse_atom(p, poly, diagrams)
        left = Par(left, right)
    return left


def _parse_atom(p: _Parser, poly, diagrams) -> Diagram:
    tok = p.next()
    if tok.kind == "(":
        inner = _parse_expr(p, poly, diagrams)
        p.expect(")")
        return inner
    if tok.kind != "name":
        raise ParseError(f"expected an expression, found {tok.text or tok.kind!r}", tok.line, tok.col)
    if tok.text == "id":
        obj = p.expect_name("an object")
        return Id((obj.text,))
    if tok.text == "swap":
        x = p.expect_name("an object")
        y = p.expect_name("an object")
        return Sym(x.text, y.text)
    if tok.text == "wait":
        obj = p.expect_name("an object")
        return wait(obj.text)
    if tok.text == "up":
        p.expect("(")
        inner = _parse_expr(p, poly, diagrams)
        p.expect(",")
        target = p.expect_nat()
        p.expect(")")
        return Regrade(inner, target)
    if poly.has_generator(tok.text):
        return Gen(poly.generator(tok.text))
    if tok.text in diagrams:
        return diagrams[tok.text]
    raise ParseError(f"unknown identifier {tok.text!r}", tok.line, tok.col)


def _parse_tiling(p: _Parser, objects, generators) -> Tiling:
    gen_names = {g.name for g in generators}
    p.expect("{")
    tiles: list[Tile] = []
    braids: list[BraidMark] = []
    width = 0
    height = 0
    while True:
        p.skip_eol()
        tok = p.peek()
        if tok.kind == "}":
            p.next()
            break
        if tok.kind == ";":
            p.next()
            continue
        if tok.kind != "name":
            raise ParseError(f"expected 'tile' or 'braid', found {tok.text or tok.kind!r}", tok.line, tok.col)
        if tok.text == "tile":
            p.next()
            name = p.expect_name("a tile name").text
            p.expect(":")
            gen_tok = p.expect_name("a generator or 'wait'")
            obj = None
            if gen_tok.text == "wait":
                gen = "wait"
                if p.peek().kind == "name" and p.peek().text != "rect":
                    obj = p.expect_name("an object").text
                    if obj not in objects:
                        raise ParseError(f"unknown object {obj!r}", gen_tok.line, gen_tok.col)
            else:
                if gen_tok.text not in gen_names:
                    raise ParseError(f"unknown generator {gen_tok.text!r}", gen_tok.line, gen_tok.col)
                gen = gen_tok.text
            rect = p.expect_name("'rect'")
            if rect.text != "rect":
                raise ParseError(f"expected 'rect', found {rect.text!r}", rect.line, rect.col)
            x0 = p.expect_nat()
            p.expect("..")
            x1 = p.expect_nat()
            sep = p.expect_name("'x'")
            if sep.text != "x":
                raise ParseError(f"expected 'x', found {sep.text!r}", sep.line, sep.col)
            y0 = p.expect_nat()
            p.expect("..")
            y1 = p.expect_nat()
            tiles.append(Tile(name, gen, x0, x1, y0, y1, obj))
            width = max(width, x1)
            height = max(height, y1)
        elif tok.text == "braid":
            p.next()
            at = p.expect_name("'at'")
            if at.text != "at":
                raise ParseError(f"expected 'at', found {at.text!r}", at.line, at.col)
            col = p.expect_nat()
            lane_kw = p.expect_name("'lane'")
            if lane_kw.text != "lane":
                raise ParseError(f"expected 'lane', found {lane_kw.text!r}", lane_kw.line, lane_kw.col)
            lane = p.expect_nat()
            p.expect("(")
            x = p.expect_name("an object").text
            p.expect(",")
            y = p.expect_name("an object").text
            p.expect(")")
            for o in (x, y):
                if o not in objects:
                    raise ParseError(f"unknown object {o!r}", tok.line, tok.col)
            braids.append(BraidMark(col, lane, (x, y)))
        else:
            raise ParseError(f"expected 'tile' or 'braid', found {tok.text!r}", tok.line, tok.col)
    return Tiling(width, height, tuple(tiles), tuple(braids))


def print_theory(tf: TheoryFile) -> str:
    """Canonical text form; parse(print_theory(parse(s))) == parse(s)."""
    lines = []
    if tf.polygraph.objects:
        lines.append("obj " + " ".join(tf.polygraph.objects))
    for g in tf.polygraph.generators:
        ins = " ".join(g.inputs)
        outs = " ".join(g.outputs)
        lines.append(f"gen {g.name} : {ins + ' ' if ins else ''}-> {outs + ' ' if outs else ''}@ {g.time}")
    for name, d in tf.diagrams.items():
        lines.append(f"diag {name} = {print_expr(d)}")
    for name, t in tf.tilings.items():
        lines.append(f"tiling {name} {{")
        for tile in t.tiles:
            obj = f" {tile.obj}" if tile.obj is not None else ""
            lines.append(
                f"  tile {tile.name} : {tile.gen}{obj} rect {tile.x0}..{tile.x1} x {tile.y0}..{tile.y1}"
            )
        for b in t.braids:
            lines.append(f"  braid at {b.col} lane {b.lane} ({b.pair[0]}, {b.pair[1]})")
        lines.append("}")
    return "\n".join(lines) + "\n"


def print_expr(d: Diagram, level: int = 0) -> str:
    """level 0 allows ';', level 1 allows '*', level 2 is atomic."""
    if isinstance(d, Seq):
        body = f"{print_expr(d.first, 0)} ; {print_expr(d.second, 0)}"
        return f"({body})" if level > 0 else body
    if isinstance(d, Par):
        body = f"{print_expr(d.top, 1)} * {print_expr(d.bottom, 1)}"
        return f"({body})" if level > 1 else body
    if isinstance(d, Gen):
        return d.gen.name
    if isinstance(d, Id):
        if not d.objects:
            raise ValueError("the empty identity has no concrete syntax")
        if len(d.objects) == 1:
            return f"id {d.objects[0]}"
        out = " * ".join(f"id {x}" for x in d.objects)
        return f"({out})" if level > 1 else out
    if isinstance(d, Sym):
        return f"swap {d.x} {d.y}"
    if isinstance(d, Regrade):
        if isinstance(d.inner, Id) and len(d.inner.objects) == 1 and d.target == 1:
            return f"wait {d.inner.objects[0]}"
        return f"up({print_expr(d.inner, 0)}, {d.target})"
    raise ValueError(f"cannot print {d!r}")
