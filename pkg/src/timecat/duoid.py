"""Grade algebra: posets with two interacting monoid structures.

The default instance is (N, +, 0, max, 0): durations compose sequentially
by addition and in parallel by maximum.  Grades are plain Python ints, so
they never overflow.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

Grade = int


def seq_grade(a: Grade, b: Grade) -> Grade:
    """Sequential composition of durations: a + b."""
    return a + b


def par_grade(a: Grade, b: Grade) -> Grade:
    """Parallel composition of durations: max(a, b)."""
    return a if a >= b else b


def grade_leq(a: Grade, b: Grade) -> bool:
    return a <= b


@dataclass(frozen=True)
class DuoidSpec:
    """A candidate duoid, packaged for the law checker.

    `sample` draws one element given an rng; the checker combines it with
    an exhaustive small grid provided by `grid`.
    """

    leq: Callable[[object, object], bool]
    seq_op: Callable[[object, object], object]
    par_op: Callable[[object, object], object]
    zero: object
    bottom: object
    normal: bool = True
    commutative: bool = True
    sample: Callable[[random.Random], object] = lambda rng: rng.randint(0, 20)
    grid: tuple = tuple(range(5))


MAX_PLUS = DuoidSpec(
    leq=grade_leq,
    seq_op=seq_grade,
    par_op=par_grade,
    zero=0,
    bottom=0,
)

MIN_PLUS_BROKEN = DuoidSpec(
    leq=grade_leq,
    seq_op=seq_grade,
    par_op=min,
    zero=0,
    bottom=0,
)

TRIVIAL = DuoidSpec(
    leq=lambda a, b: True,
    seq_op=lambda a, b: 0,
    par_op=lambda a, b: 0,
    zero=0,
    bottom=0,
    sample=lambda rng: 0,
    grid=(0,),
)


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.law}: witness {self.witness}"


@dataclass
class LawReport:
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _binary_laws(spec: DuoidSpec, name: str, op, unit, commutative: bool):
    """Yield (law, arity, predicate) triples for one monoid structure."""
    yield (f"{name}-assoc", 3, lambda a, b, c: op(op(a, b), c) == op(a, op(b, c)))
    yield (f"{name}-unit-left", 1, lambda a: op(unit, a) == a)
    yield (f"{name}-unit-right", 1, lambda a: op(a, unit) == a)
    yield (
        f"{name}-monotone",
        4,
        lambda a, b, c, d: not (spec.leq(a, b) and spec.leq(c, d))
        or spec.leq(op(a, c), op(b, d)),
    )
    if commutative:
        yield (f"{name}-commutative", 2, lambda a, b: op(a, b) == op(b, a))


def _laws(spec: DuoidSpec):
    yield ("leq-reflexive", 1, lambda a: spec.leq(a, a))
    yield (
        "leq-antisymmetric",
        2,
        lambda a, b: not (spec.leq(a, b) and spec.leq(b, a)) or a == b,
    )
    yield (
        "leq-transitive",
        3,
        lambda a, b, c: not (spec.leq(a, b) and spec.leq(b, c)) or spec.leq(a, c),
    )
    yield from _binary_laws(spec, "seq", spec.seq_op, spec.zero, spec.commutative)
    yield from _binary_laws(spec, "par", spec.par_op, spec.bottom, spec.commutative)
    yield (
        "lax-distributivity",
        4,
        lambda a, b, c, d: spec.leq(
            spec.par_op(spec.seq_op(a, b), spec.seq_op(c, d)),
            spec.seq_op(spec.par_op(a, c), spec.par_op(b, d)),
        ),
    )
    yield ("zero-par-zero", 0, lambda: spec.leq(spec.par_op(spec.zero, spec.zero), spec.zero))
    yield (
        "bottom-seq-split",
        0,
        lambda: spec.leq(spec.bottom, spec.seq_op(spec.bottom, spec.bottom)),
    )
    yield ("bottom-leq-zero", 0, lambda: spec.leq(spec.bottom, spec.zero))
    if spec.normal:
        yield ("normality", 0, lambda: spec.bottom == spec.zero)


def _tuples(pool, arity):
    if arity == 0:
        yield ()
        return
    for t in _tuples(pool, arity - 1):
        for x in pool:
            yield t + (x,)


def check_duoid_laws(spec: DuoidSpec, sample_count: int, seed: int) -> LawReport:
    """Check every duoid law on an exhaustive grid plus seeded random tuples.

    The report lists the lexicographically smallest grid witness per violated
    law; random-phase witnesses are appended only for laws the grid missed.
    Deterministic for a fixed seed.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = random.Random(seed)
    report = LawReport()
    laws = list(_laws(spec))

    violated: dict[str, Violation] = {}
    for law, arity, pred in laws:
        for args in sorted(_tuples(spec.grid, arity)):
            report.checked += 1
            if not pred(*args):
                violated[law] = Violation(law, args)
                break

    for _ in range(sample_count):
        pool = tuple(spec.sample(rng) for _ in range(4))
        for law, arity, pred in laws:
            if law in violated:
                continue
            args = pool[:arity]
            report.checked += 1
            if not pred(*args):
                violated[law] = Violation(law, args)

    report.violations = [violated[law] for law, _, _ in laws if law in violated]
    return report
