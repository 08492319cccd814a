"""Measure-zero target sets: G-delta descriptions with certified decay rates.

A target is described by its nested clopen stages stage(0) ⊇ stage(1) ⊇ …
with stage(0) the full space and λ(stage(n)) ≤ rate(n) → 0; the set itself
is the intersection.  Finite unions of these are the Σ⁰₃ inputs the rest of
the package consumes.

Two built-in families carry closed-form stage geometry (measure of
stage(n) ∩ N_t, the stage cylinder containing a point, exit stages), which
is what keeps deep constructions feasible: materialized stage antichains grow
like 2^n and are out of reach long before the stage budgets of interest.
Explicitly-listed stage documents take the materialized path instead.
"""

from __future__ import annotations

import enum
import re
from typing import Callable, Optional, Sequence

from .bits import EMPTY, BitString, Point
from .clopen import ClopenSet
from .dyadic import Dyadic
from .errors import HorizonExhausted, ParseError


class Membership(enum.Enum):
    IN = "In"
    OUT = "Out"
    UNDECIDED = "Undecided"

    def __str__(self) -> str:
        return self.value


class GDeltaSet:
    """Base: nested clopen stages with a decay-rate certificate."""

    kind = "gdelta"

    def stage(self, n: int) -> ClopenSet:
        raise NotImplementedError

    def rate(self, n: int) -> Dyadic:
        """Certified bound: λ(stage(n)) ≤ rate(n), rate(n) → 0."""
        raise NotImplementedError

    def measure_stage_in(self, n: int, t: BitString) -> Dyadic:
        """λ(stage(n) ∩ N_t), exact."""
        return self.stage(n).measure_in(t)

    def stage_cylinder_containing(self, n: int, beta: Point) -> Optional[BitString]:
        """The canonical-antichain cylinder of stage(n) containing beta."""
        return self.stage(n).cylinder_containing(beta)

    def stage_max_len(self, n: int) -> int:
        return self.stage(n).max_len()

    def first_stage_cylinder(self, n: int) -> BitString:
        cyls = self.stage(n).cylinders
        if not cyls:
            raise ValueError(f"stage {n} is empty")
        return cyls[0]

    def exit_stage(self, beta: Point) -> Optional[int]:
        """First n with beta outside stage(n); None when beta is in the set.

        Exact for every supported description (eventually periodic points,
        eventually constant or pattern-defined stages)."""
        raise NotImplementedError

    def stage_refutation_depth(self, n: int, beta: Point) -> int:
        """Minimal l with N_{beta|l} disjoint from stage(n).
        Precondition: beta is outside stage(n)."""
        stage = self.stage(n)
        for l in range(stage.max_len() + 1):
            if not stage.meets(beta.prefix(l)):
                return l
        raise ValueError(f"point is inside stage {n}")

    def meets_target(self, t: BitString) -> bool:
        """Does N_t intersect the target set?  Exact."""
        raise NotImplementedError

    def stage_count(self, n: int) -> int:
        """Number of canonical-antichain cylinders of stage(n)."""
        return len(self.stage(n).cylinders)

    def stage_sample(self, n: int, count: int) -> list:
        """First `count` antichain cylinders of stage(n), breadth-first."""
        return list(self.stage(n).cylinders[:count])

    def membership(self, beta: Point, depth: int) -> Membership:
        """Depth-indexed tri-state: Out requires exiting one of the first
        `depth` stages; In is exact (decidable for this input class)."""
        e = self.exit_stage(beta)
        if e is None:
            return Membership.IN
        return Membership.OUT if e <= depth else Membership.UNDECIDED

    # Structure flags used by the synthesis fast path.
    self_covering = False  # every maximal stage cylinder meets the target
    witness_uniform = False  # all stage cylinders share one measure profile
    frozen_from = None  # stage index from which stage(n) stops changing

    def to_spec_dict(self) -> dict:
        raise NotImplementedError


def _odd_positions_in(lo: int, hi: int) -> int:
    """Count odd integers in [lo, hi)."""
    if hi <= lo:
        return 0
    first = lo if lo % 2 == 1 else lo + 1
    if first >= hi:
        return 0
    return (hi - 1 - first) // 2 + 1


class EvenZeros(GDeltaSet):
    """{β : β(2i) = 0 for all i} — positions 0-indexed.

    stage(n) pins the first n even positions to zero; its canonical antichain
    is the 2^(n-1) strings of length 2n-1 with zeros at even positions (the
    final even position 2n-2 is the last constrained one; position 2n-1 is
    free, so length-2n descriptions merge).
    """

    kind = "even-zeros"
    self_covering = True
    witness_uniform = True

    @staticmethod
    def _stage_cylinder(n: int, w: int) -> BitString:
        """The w-th antichain cylinder of stage(n): odd positions carry the
        bits of w (most significant first), even positions are zero."""
        length = 2 * n - 1
        v = 0
        bit_src = n - 2  # odd positions 1,3,...,2n-3 take bits of w
        for pos in range(length):
            v <<= 1
            if pos % 2 == 1:
                v |= (w >> bit_src) & 1
                bit_src -= 1
        return BitString.raw(length, v)

    def stage(self, n: int) -> ClopenSet:
        if n == 0:
            return ClopenSet.full()
        if n > 18:
            raise HorizonExhausted(
                f"even-zeros stage antichain at n={n}",
                f"2^{n - 1} cylinders; use the closed-form queries instead",
            )
        cyls = [self._stage_cylinder(n, w) for w in range(1 << (n - 1))]
        return ClopenSet.from_cylinders(cyls)

    def stage_count(self, n: int) -> int:
        return 1 if n == 0 else 1 << (n - 1)

    def stage_sample(self, n: int, count: int) -> list:
        if n == 0:
            return [EMPTY]
        return [
            self._stage_cylinder(n, w)
            for w in range(min(count, 1 << (n - 1)))
        ]

    def rate(self, n: int) -> Dyadic:
        return Dyadic.pow2(-n)

    def measure_stage_in(self, n: int, t: BitString) -> Dyadic:
        bound = min(len(t), 2 * n)
        for i in range(0, bound, 2):
            if t.bit(i):
                return Dyadic.zero()
        if len(t) >= 2 * n:
            return Dyadic.pow2(-len(t))
        free = _odd_positions_in(len(t), 2 * n)
        return Dyadic.pow2(free - 2 * n)

    def stage_cylinder_containing(self, n: int, beta: Point) -> Optional[BitString]:
        if n == 0:
            return EMPTY
        for i in range(0, 2 * n, 2):
            if beta.bit_at(i):
                return None
        return beta.prefix(2 * n - 1)

    def stage_max_len(self, n: int) -> int:
        return max(2 * n - 1, 0)

    def first_stage_cylinder(self, n: int) -> BitString:
        return BitString.zeros(max(2 * n - 1, 0))

    def exit_stage(self, beta: Point) -> Optional[int]:
        bound = len(beta.prefix_bits) + 2 * len(beta.period_bits)
        for i in range(0, bound, 2):
            if beta.bit_at(i):
                return i // 2 + 1
        return None

    def stage_refutation_depth(self, n: int, beta: Point) -> int:
        for i in range(0, 2 * n, 2):
            if beta.bit_at(i):
                return i + 1
        raise ValueError(f"point is inside stage {n}")

    def meets_target(self, t: BitString) -> bool:
        return all(t.bit(i) == 0 for i in range(0, len(t), 2))

    def to_spec_dict(self) -> dict:
        return {"kind": "even-zeros"}


class Singleton(GDeltaSet):
    """One eventually-periodic point; stage(n) is its length-n cylinder."""

    kind = "singleton"
    self_covering = True
    witness_uniform = True

    def __init__(self, point: Point) -> None:
        self.point = point

    def stage(self, n: int) -> ClopenSet:
        return ClopenSet.cylinder(self.point.prefix(n))

    def rate(self, n: int) -> Dyadic:
        return Dyadic.pow2(-n)

    def measure_stage_in(self, n: int, t: BitString) -> Dyadic:
        w = self.point.prefix(n)
        if w.is_prefix_of(t):
            return Dyadic.pow2(-len(t))
        if t.is_prefix_of(w):
            return Dyadic.pow2(-n)
        return Dyadic.zero()

    def stage_cylinder_containing(self, n: int, beta: Point) -> Optional[BitString]:
        w = self.point.prefix(n)
        return w if beta.starts_with(w) else None

    def stage_max_len(self, n: int) -> int:
        return n

    def first_stage_cylinder(self, n: int) -> BitString:
        return self.point.prefix(n)

    def exit_stage(self, beta: Point) -> Optional[int]:
        d = beta.first_difference(self.point)
        return None if d is None else d + 1

    def stage_refutation_depth(self, n: int, beta: Point) -> int:
        d = beta.first_difference(self.point)
        if d is None or d >= n:
            raise ValueError(f"point is inside stage {n}")
        return d + 1

    def meets_target(self, t: BitString) -> bool:
        return self.point.starts_with(t)

    def to_spec_dict(self) -> dict:
        return {"kind": "singleton", "point": str(self.point)}


class ExplicitGDelta(GDeltaSet):
    """Finitely listed stages, the last one repeating.

    The repeating tail means the denoted set is the last listed stage; a
    nonempty tail therefore cannot actually have measure zero and will make
    synthesis budgets fail — that failure surfaces as HorizonExhausted at
    build time, by design.  Decreasingness and the declared rate are checked
    on the listed stages up front (stage(0) must be full; rate is checked
    from stage 1 on, since λ(stage(0)) = 1 always).
    """

    kind = "explicit"

    def __init__(
        self,
        stages: Sequence[ClopenSet],
        rate_fn: Callable[[int], Dyadic],
        rate_text: str,
    ) -> None:
        stages = list(stages)
        if not stages:
            raise ParseError("explicit description needs at least one stage")
        if not stages[0].is_full:
            stages.insert(0, ClopenSet.full())
        for n in range(len(stages) - 1):
            if not stages[n + 1].is_subset_of(stages[n]):
                raise ParseError(f"explicit stages not decreasing at index {n + 1}")
        for n in range(1, len(stages)):
            if stages[n].measure > rate_fn(n):
                raise ParseError(
                    f"stage {n} has measure {stages[n].measure} "
                    f"exceeding declared rate {rate_fn(n)}"
                )
        self.stages = stages
        self._rate_fn = rate_fn
        self.rate_text = rate_text
        self.frozen_from = len(stages) - 1
        last = stages[-1]
        # Every maximal cylinder of every stage must meet the denoted set
        # (= the last stage) for the structured synthesis path to apply; we
        # just record the flag, the synthesis module picks the path.
        self.self_covering = all(
            all(last.meets(c) for c in st.cylinders) for st in stages
        )

    def stage(self, n: int) -> ClopenSet:
        return self.stages[min(n, len(self.stages) - 1)]

    def rate(self, n: int) -> Dyadic:
        return self._rate_fn(n)

    def exit_stage(self, beta: Point) -> Optional[int]:
        if self.stages[-1].contains_point(beta):
            return None
        for n in range(1, len(self.stages)):
            if not self.stages[n].contains_point(beta):
                return n
        raise AssertionError("unreachable: stages are decreasing")

    def meets_target(self, t: BitString) -> bool:
        return self.stages[-1].meets(t)

    def to_spec_dict(self) -> dict:
        return {
            "kind": "explicit",
            "stages": [[str(c) for c in st.cylinders] for st in self.stages],
            "rate": self.rate_text,
        }


class SigmaThreeSet:
    """Finite union of G-delta targets (the Σ⁰₃ input class)."""

    def __init__(self, components: Sequence[GDeltaSet]) -> None:
        self.components = list(components)

    def membership(self, beta: Point, depth: int) -> Membership:
        verdicts = [c.membership(beta, depth) for c in self.components]
        if any(v is Membership.IN for v in verdicts):
            return Membership.IN
        if all(v is Membership.OUT for v in verdicts):
            return Membership.OUT
        return Membership.UNDECIDED

    def to_spec_dict(self) -> dict:
        return {
            "kind": "sigma3",
            "components": [c.to_spec_dict() for c in self.components],
        }

    @staticmethod
    def from_spec(doc: dict) -> "SigmaThreeSet":
        if not isinstance(doc, dict) or doc.get("kind") != "sigma3":
            raise ParseError("set description must have kind 'sigma3'")
        comps = doc.get("components")
        if not isinstance(comps, list):
            raise ParseError("set description needs a 'components' list")
        return SigmaThreeSet([component_from_spec(c) for c in comps])


class StageView:
    """Read-only handle on stage(n) of a target, answering measure/geometry
    queries through the closed forms (no antichain materialization)."""

    __slots__ = ("gdelta", "n")

    def __init__(self, gdelta: GDeltaSet, n: int) -> None:
        self.gdelta = gdelta
        self.n = n

    def measure_in(self, t: BitString) -> Dyadic:
        return self.gdelta.measure_stage_in(self.n, t)

    @property
    def measure(self) -> Dyadic:
        return self.measure_in(EMPTY)

    def meets(self, t: BitString) -> bool:
        return self.measure_in(t) > 0

    def covers(self, t: BitString) -> bool:
        return self.measure_in(t) == Dyadic.pow2(-len(t))

    def cylinder_containing(self, beta: Point) -> Optional[BitString]:
        return self.gdelta.stage_cylinder_containing(self.n, beta)

    def contains_point(self, beta: Point) -> bool:
        return self.cylinder_containing(beta) is not None

    def max_len(self) -> int:
        return self.gdelta.stage_max_len(self.n)

    def materialize(self) -> ClopenSet:
        return self.gdelta.stage(self.n)


# -- spec-level operations --------------------------------------------------


def even_zeros() -> EvenZeros:
    return EvenZeros()


def singleton(beta: Point) -> Singleton:
    return Singleton(beta)


def membership(s, beta: Point, depth: int) -> Membership:
    """Tri-state membership for a G-delta or Σ⁰₃ handle."""
    return s.membership(beta, depth)


def density_ratio(m, beta: Point, l: int) -> Dyadic:
    """λ(M ∩ N_{β|l}) / λ(N_{β|l}) for a clopen set or stage view."""
    t = beta.prefix(l)
    return m.measure_in(t).mul_pow2(l)


# -- rate strings ------------------------------------------------------------

_RATE_FORMS = ("2^-n", "2^-(n+c)", "2^-(n-c)")


def parse_rate(text: str) -> Callable[[int], Dyadic]:
    """Accepted decay-rate strings: 2^-n, 2^-(n+c), 2^-(n-c) (c a literal
    natural number).  All denote exact powers of two."""
    if not isinstance(text, str):
        raise ParseError(f"rate must be a string, got {type(text).__name__}")
    s = text.replace(" ", "")
    if s == "2^-n":
        return lambda n: Dyadic.pow2(-n)
    m = re.fullmatch(r"2\^-\(n([+-])(\d+)\)", s)
    if m:
        c = int(m.group(2))
        if m.group(1) == "+":
            return lambda n: Dyadic.pow2(-(n + c))
        return lambda n: Dyadic.pow2(-(n - c))
    raise ParseError(f"unsupported rate {text!r}; accepted forms: {_RATE_FORMS}")


def component_from_spec(doc: dict) -> GDeltaSet:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError(f"bad component description: {doc!r}")
    kind = doc["kind"]
    if kind == "even-zeros":
        return EvenZeros()
    if kind == "singleton":
        if "point" not in doc:
            raise ParseError("singleton component needs a 'point'")
        return Singleton(Point.parse(doc["point"]))
    if kind == "explicit":
        stages = doc.get("stages")
        if not isinstance(stages, list) or not all(
            isinstance(st, list) for st in stages
        ):
            raise ParseError("explicit component needs 'stages': list of lists")
        rate_text = doc.get("rate", "2^-n")
        return ExplicitGDelta(
            [ClopenSet.from_strings(st) for st in stages],
            parse_rate(rate_text),
            rate_text,
        )
    raise ParseError(f"unknown component kind {kind!r}")
