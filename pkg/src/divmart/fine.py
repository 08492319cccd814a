"""Density-topology toolkit: interpolating closed sets and graded separators.

The central construction takes a closed set F inside an open set M (open in
the density sense: here, clopen, a clopen-piece union, or the complement of
a measure-zero target) and produces a closed C with F ⊆ C ⊆ M that fills
almost all of M locally: for each maximal cylinder s_n of the complement of
F (breadth-first order), C grabs a clopen subset of M ∩ N_{s_n} of measure
at least (1 - budget(n))·λ(M ∩ N_{s_n}).

Iterating this between dyadic levels yields a graded family of closed sets
C_ζ (ζ dyadic in (0,1], decreasing in ζ) separating a closed C from a
measure-zero target G: the separator function h equals 1 on G, 0 on C, and
is approximately continuous, with every level set exactly representable.

Representation note: every set built along the pipeline is *denotationally
clopen* but may be far too large to materialize (its description involves
complements of deep target stages).  Sets are therefore unions of disjoint
lazy *pieces* — materialized clopen sets, "cylinder minus target-stage"
chunks, and "clopen minus earlier level" differences — each answering
exact measure queries against arbitrary clopen constraints.  Measure zero
is emptiness for such sets, so meets/covers/membership reduce to exact
dyadic comparisons.
"""

from __future__ import annotations

from typing import Callable, Iterator, NamedTuple, Optional, Sequence, Union

from .bits import EMPTY, BitString, Point
from .clopen import ClopenSet
from .dyadic import Dyadic
from .errors import HorizonExhausted
from .sets import GDeltaSet, Membership

_SEARCH_CAP = 100_000


# ---------------------------------------------------------------------------
# pieces


class ClopenPiece:
    __slots__ = ("clopen",)

    def __init__(self, clopen: ClopenSet) -> None:
        self.clopen = clopen

    def measure_within_clopen(self, k: ClopenSet) -> Dyadic:
        return self.clopen.intersect(k).measure

    def contains_point(self, beta: Point) -> bool:
        return self.clopen.contains_point(beta)

    def restrict(self, t: BitString) -> Optional["ClopenPiece"]:
        c = self.clopen.intersect(ClopenSet.cylinder(t))
        return None if c.is_empty else ClopenPiece(c)

    def __repr__(self) -> str:
        return f"ClopenPiece({self.clopen!r})"


class StageComplementChunk:
    """N_support minus stage(k) of a target — clopen, never materialized."""

    __slots__ = ("support", "gdelta", "k")

    def __init__(self, support: BitString, gdelta: GDeltaSet, k: int) -> None:
        self.support = support
        self.gdelta = gdelta
        self.k = k

    def measure_within_clopen(self, k: ClopenSet) -> Dyadic:
        inside = k.intersect(ClopenSet.cylinder(self.support))
        total = Dyadic.zero()
        for c in inside.cylinders:
            total = total + Dyadic.pow2(-len(c)) - self.gdelta.measure_stage_in(
                self.k, c
            )
        return total

    def contains_point(self, beta: Point) -> bool:
        return beta.starts_with(self.support) and (
            self.gdelta.stage_cylinder_containing(self.k, beta) is None
        )

    def restrict(self, t: BitString) -> Optional["StageComplementChunk"]:
        if self.support.is_prefix_of(t):
            chunk = StageComplementChunk(t, self.gdelta, self.k)
            if chunk.measure_within_clopen(ClopenSet.full()) == 0:
                return None
            return chunk
        if t.is_prefix_of(self.support):
            return self
        return None

    def __repr__(self) -> str:
        return f"StageComplementChunk({self.support!r}, stage={self.k})"


class DifferencePiece:
    """Clopen W minus an earlier piece-set (used to union a new clopen
    region into a level without materializing the overlap)."""

    __slots__ = ("positive", "minus")

    def __init__(self, positive: ClopenSet, minus: "ClosedPieceSet") -> None:
        self.positive = positive
        self.minus = minus

    def measure_within_clopen(self, k: ClopenSet) -> Dyadic:
        inside = self.positive.intersect(k)
        if inside.is_empty:
            return Dyadic.zero()
        return inside.measure - self.minus.measure_within_clopen(inside)

    def contains_point(self, beta: Point) -> bool:
        return self.positive.contains_point(beta) and not self.minus.contains_point(
            beta
        )

    def restrict(self, t: BitString) -> Optional["DifferencePiece"]:
        c = self.positive.intersect(ClopenSet.cylinder(t))
        if c.is_empty:
            return None
        piece = DifferencePiece(c, self.minus)
        if piece.measure_within_clopen(ClopenSet.full()) == 0:
            return None
        return piece

    def __repr__(self) -> str:
        return f"DifferencePiece({self.positive!r} \\ ...)"


Piece = Union[ClopenPiece, StageComplementChunk, DifferencePiece]


# ---------------------------------------------------------------------------
# closed piece sets


class ClosedPieceSet:
    """core ∪ disjoint pieces.  The core (a measure-zero target handle) adds
    no measure; the pieces are denotationally clopen, so all measure queries
    are exact and measure-positivity equals nonemptiness of the piece part."""

    def __init__(
        self, pieces: Sequence[Piece], core: Optional[GDeltaSet] = None
    ) -> None:
        self.pieces = list(pieces)
        self.core = core
        self._measure_cache: dict = {}
        # Populated by lusin_menchoff: one record per complement cylinder,
        # so the interpolation conditions can be re-verified afterwards.
        self.fills: list["FillRecord"] = []

    @staticmethod
    def from_clopen(c: ClopenSet) -> "ClosedPieceSet":
        return ClosedPieceSet([] if c.is_empty else [ClopenPiece(c)])

    @staticmethod
    def empty() -> "ClosedPieceSet":
        return ClosedPieceSet([])

    def measure_within_clopen(self, k: ClopenSet) -> Dyadic:
        key = k._ac
        hit = self._measure_cache.get(key)
        if hit is not None:
            return hit
        total = Dyadic.zero()
        for p in self.pieces:
            total = total + p.measure_within_clopen(k)
        self._measure_cache[key] = total
        return total

    def measure_in(self, t: BitString) -> Dyadic:
        return self.measure_within_clopen(ClopenSet.cylinder(t))

    @property
    def measure(self) -> Dyadic:
        return self.measure_in(EMPTY)

    def meets(self, t: BitString) -> bool:
        if self.measure_in(t) > 0:
            return True
        return self.core is not None and self.core.meets_target(t)

    def covers(self, t: BitString) -> bool:
        return self.measure_in(t) == Dyadic.pow2(-len(t))

    def contains_point(self, beta: Point) -> bool:
        if self.core is not None and self.core.exit_stage(beta) is None:
            return True
        return any(p.contains_point(beta) for p in self.pieces)

    def union_with_clopen(self, w: ClopenSet) -> "ClosedPieceSet":
        if w.is_empty:
            return self
        return ClosedPieceSet(self.pieces + [DifferencePiece(w, self)], self.core)

    def decomposition(self, cap: int = 20_000) -> list[BitString]:
        """Canonical (breadth-first maximal-cylinder) antichain of the
        complement.  Requires a core-free set — i.e. a denotationally clopen
        one — so the walk terminates exactly.  `cap` bounds the number of
        cylinders the walk may *examine*, not just yield: a complement that
        keeps splitting at every depth (e.g. fill slivers hugging a
        measure-zero boundary) fails fast instead of marching forever."""
        if self.core is not None:
            raise ValueError("infinite decomposition; use decomposition_stream")
        return list(_decompose(self, None, work_cap=cap))

    def decomposition_stream(self) -> Iterator[BitString]:
        return _decompose(self, self.core)


def _decompose(
    pieces: ClosedPieceSet,
    core: Optional[GDeltaSet],
    work_cap: Optional[int] = None,
) -> Iterator[BitString]:
    """Breadth-first maximal cylinders of the complement of core ∪ pieces."""
    examined = 0
    queue = [EMPTY]
    while queue:
        next_queue = []
        for t in queue:
            examined += 1
            if work_cap is not None and examined > work_cap:
                raise HorizonExhausted(
                    "complement decomposition work",
                    f"examined more than {work_cap} cylinders without closing "
                    f"the antichain; the interpolation at this level is not "
                    f"tractable",
                )
            m = pieces.measure_in(t)
            core_meets = core is not None and core.meets_target(t)
            if m == 0 and not core_meets:
                yield t
            elif m == Dyadic.pow2(-len(t)):
                continue  # cylinder entirely inside the set
            else:
                next_queue.append(t.child(0))
                next_queue.append(t.child(1))
        queue = next_queue


# ---------------------------------------------------------------------------
# open-set streams


class OpenSetStream:
    """An open set presented as disjoint clopen pieces with a certified
    bound on the measure of the un-enumerated tail."""

    def __init__(
        self,
        piece_fn: Callable[[int], Optional[ClopenSet]],
        tail_bound_fn: Callable[[int], Dyadic],
        complement_of: Optional[GDeltaSet] = None,
    ) -> None:
        self.piece = piece_fn
        self.tail_bound = tail_bound_fn
        self.complement_of = complement_of

    @staticmethod
    def from_pieces(pieces: Sequence[ClopenSet]) -> "OpenSetStream":
        items = list(pieces)

        def piece(n: int) -> Optional[ClopenSet]:
            return items[n] if n < len(items) else None

        def tail(n: int) -> Dyadic:
            return Dyadic.zero() if n >= len(items) else _measure_sum(items[n:])

        return OpenSetStream(piece, tail)

    @staticmethod
    def complement_of_target(g: GDeltaSet) -> "OpenSetStream":
        """Complement of a measure-zero target as the disjoint union of
        stage(n) \\ stage(n+1); tail after n is inside stage(n), measure
        ≤ rate(n).  Pieces materialize stages, so only use the enumeration
        for shallow n — the interpolation below never needs it."""

        def piece(n: int) -> Optional[ClopenSet]:
            return g.stage(n).minus(g.stage(n + 1))

        return OpenSetStream(piece, g.rate, complement_of=g)


def _measure_sum(sets: Sequence[ClopenSet]) -> Dyadic:
    total = Dyadic.zero()
    for s in sets:
        total = total + s.measure
    return total


# ---------------------------------------------------------------------------
# the interpolation lemma


def default_budget(n: int) -> Dyadic:
    return Dyadic.pow2(-n)


MHandle = Union[ClopenSet, ClosedPieceSet, OpenSetStream]


class FillRecord(NamedTuple):
    """What the interpolation put inside the n-th complement cylinder."""

    index: int
    cylinder: BitString
    pieces: tuple  # Piece tuple
    fill_measure: Dyadic
    m_measure_hi: Dyadic  # upper bound on λ(M ∩ N_s) valid at build time


def lusin_menchoff(
    f: Union[ClopenSet, ClosedPieceSet],
    m: MHandle,
    budget: Callable[[int], Dyadic] = default_budget,
) -> ClosedPieceSet:
    """Closed C with F ⊆ C ⊆ F ∪ M such that for the n-th maximal cylinder
    s_n of the complement of F, λ(C ∩ N_{s_n}) ≥ (1-budget(n))·λ(M ∩ N_{s_n}).

    Every point added to C lies inside a clopen piece of M, so C has full
    density inside M at each of its new points; F's own structure is carried
    over untouched.  The n = 0 requirement is vacuous for the default budget.
    """
    fs = ClosedPieceSet.from_clopen(f) if isinstance(f, ClopenSet) else f
    if fs.core is None:
        new_pieces: list[Piece] = []
        fills: list[FillRecord] = []
        for n, s in enumerate(fs.decomposition()):
            got, m_hi = _inner_approx(m, s, budget(n))
            new_pieces.extend(got)
            fills.append(_fill_record(n, s, got, m_hi))
        out = ClosedPieceSet(fs.pieces + new_pieces, None)
        out.fills = fills
        return out
    return GrowingClosedSet(fs, m, budget)


def _fill_record(n: int, s: BitString, got: Sequence[Piece], m_hi: Dyadic) -> FillRecord:
    total = Dyadic.zero()
    for p in got:
        total = total + p.measure_within_clopen(ClopenSet.cylinder(s))
    return FillRecord(n, s, tuple(got), total, m_hi)


def _inner_approx(m: MHandle, s: BitString, eps: Dyadic) -> tuple[list[Piece], Dyadic]:
    """Clopen pieces inside M ∩ N_s of total measure ≥ (1-eps)·λ(M ∩ N_s),
    together with an upper bound on λ(M ∩ N_s) itself."""
    if isinstance(m, ClopenSet):
        c = m.intersect(ClopenSet.cylinder(s))
        return ([] if c.is_empty else [ClopenPiece(c)]), c.measure
    if isinstance(m, ClosedPieceSet):
        # Denotationally clopen: restriction is exact, no measure is lost.
        out = []
        for p in m.pieces:
            r = p.restrict(s)
            if r is not None:
                out.append(r)
        return out, m.measure_in(s)
    if isinstance(m, OpenSetStream):
        if m.complement_of is not None:
            return _stage_complement_approx(m.complement_of, s, eps)
        return _stream_approx(m, s, eps)
    raise TypeError(f"unsupported M handle {type(m).__name__}")


def _stage_complement_approx(
    g: GDeltaSet, s: BitString, eps: Dyadic
) -> tuple[list[Piece], Dyadic]:
    """Inner-approximate (complement of target) ∩ N_s by N_s \\ stage(k).

    λ(M ∩ N_s) = λ(N_s) since the target has measure zero, so the budget
    becomes λ(stage(k) ∩ N_s) ≤ eps·λ(N_s); the certified rate guarantees a
    finite k."""
    full = Dyadic.pow2(-len(s))
    bound = eps.mul_pow2(-len(s))
    k = 0
    while g.measure_stage_in(k, s) > bound:
        k += 1
        if k > _SEARCH_CAP:
            raise HorizonExhausted(
                f"inner approximation stage index at {s!r}",
                f"needed λ(stage(k) ∩ N_s) ≤ {bound}",
            )
    chunk = StageComplementChunk(s, g, k)
    if chunk.measure_within_clopen(ClopenSet.full()) == 0:
        return [], full
    return [chunk], full


def _stream_approx(
    m: OpenSetStream, s: BitString, eps: Dyadic
) -> tuple[list[Piece], Dyadic]:
    """Generic stream: accumulate pieces until the certified tail is small
    enough that the enumerated part provably meets the budget."""
    acc = ClopenSet.empty()
    cyl = ClopenSet.cylinder(s)
    h = 0
    while True:
        lower = acc.measure
        tail = m.tail_bound(h)
        hi = lower + tail
        cap = Dyadic.pow2(-len(s))
        if hi > cap:
            hi = cap
        # λ(M ∩ N_s) ≤ lower + tail, so lower ≥ (1-eps)(lower+tail) suffices.
        if lower >= (Dyadic.one() - eps) * hi:
            return ([] if acc.is_empty else [ClopenPiece(acc)]), hi
        p = m.piece(h)
        if p is None:
            if tail == 0:
                return ([] if acc.is_empty else [ClopenPiece(acc)]), lower
            raise HorizonExhausted(
                f"open-set stream ended at piece {h}",
                f"tail bound {tail} still too large for budget {eps}",
            )
        acc = acc.union(p.intersect(cyl))
        h += 1
        if h > _SEARCH_CAP:
            raise HorizonExhausted(
                f"open-set stream horizon at {s!r}",
                f"tail bound {m.tail_bound(h)} never met budget {eps}",
            )


class GrowingClosedSet(ClosedPieceSet):
    """Interpolation output when the complement of F decomposes into
    infinitely many cylinders (F has a genuine measure-zero core).  Pieces
    are generated on demand in breadth-first order; measure queries come
    back as exact brackets whose upper slack is the measure of the
    not-yet-decomposed frontier."""

    def __init__(
        self,
        fs: ClosedPieceSet,
        m: MHandle,
        budget: Callable[[int], Dyadic],
    ) -> None:
        super().__init__(list(fs.pieces), fs.core)
        self._m = m
        self._budget = budget
        self._stream = _decompose(ClosedPieceSet(fs.pieces), fs.core)
        self._next_index = 0
        self._generated: list[BitString] = []

    def extend_to_depth(self, depth: int) -> None:
        """Generate all pieces whose decomposition cylinder has length
        ≤ depth (breadth-first order makes this a finite prefix)."""
        while not self._generated or len(self._generated[-1]) <= depth:
            s = next(self._stream, None)
            if s is None:
                return
            self._generated.append(s)
            got, m_hi = _inner_approx(self._m, s, self._budget(self._next_index))
            self.pieces.extend(got)
            self.fills.append(_fill_record(self._next_index, s, got, m_hi))
            self._next_index += 1
            self._measure_cache.clear()
            if len(s) > depth:
                return

    def generated_cylinders(self) -> list[BitString]:
        return list(self._generated)

    def measure_in_bracket(self, t: BitString, depth: int) -> tuple[Dyadic, Dyadic]:
        """Exact [lo, hi] for λ(C ∩ N_t): lo from generated pieces, slack
        from the complement-of-F region deeper than `depth` that future
        pieces could still land in."""
        self.extend_to_depth(depth)
        lo = self.measure_in(t)
        done = ClopenSet.from_cylinders(
            [c for c in self._generated if len(c) <= depth]
        )
        # Future pieces land inside complement-of-F cylinders not yet
        # generated, i.e. inside N_t minus the resolved region.
        hi = lo + Dyadic.pow2(-len(t)) - done.measure_in(t)
        cap = Dyadic.pow2(-len(t))
        return lo, cap if hi > cap else hi

    def membership(self, beta: Point, depth: int) -> Membership:
        if self.core is not None and self.core.exit_stage(beta) is None:
            return Membership.IN
        self.extend_to_depth(depth)
        if any(p.contains_point(beta) for p in self.pieces):
            return Membership.IN
        # Outside every generated piece; decided only if beta's cylinder at
        # `depth` lies in an already-resolved region.
        for c in self._generated:
            if len(c) <= depth and beta.starts_with(c):
                return Membership.OUT  # fully resolved cylinder, not in pieces
        return Membership.UNDECIDED


# ---------------------------------------------------------------------------
# finite-horizon verification of the interpolation conditions


class InterpolationReport(NamedTuple):
    f_carried: bool          # (1a) F's pieces and core appear in C untouched
    fills_inside_m: bool     # (1b) every added piece sits inside M (measure-exact)
    margins_ok: bool         # (2) λ(fill_n) ≥ (1 - budget(n))·λ(M ∩ N_{s_n})
    density_ok: bool         # (3) density of C ≥ threshold at sampled F-points
    density_samples: tuple   # (point string, ratio lower bound) pairs
    failures: tuple          # human-readable descriptions of violations

    @property
    def ok(self) -> bool:
        return not self.failures


def _leftmost_point(s: BitString) -> Point:
    return Point(s, BitString("0"))


def check_interpolation(
    c: ClosedPieceSet,
    f: Union[ClopenSet, ClosedPieceSet],
    m: MHandle,
    depth: int = 20,
    budget: Callable[[int], Dyadic] = default_budget,
    density_threshold: Dyadic = None,
) -> InterpolationReport:
    """Re-verify, at a finite horizon, that C = lusin_menchoff(F, M, budget)
    satisfies the three interpolation conditions: F ⊆ C ⊆ M, the fill inside
    each complement cylinder s_n captures a (1-budget(n)) fraction of
    λ(M ∩ N_{s_n}), and C has density ≥ 1 - density_threshold at sampled
    points of F (exact 1 for points interior to clopen pieces; bracketed
    from generated pieces when F carries a measure-zero core)."""
    if density_threshold is None:
        density_threshold = Dyadic(1, 4)
    fs = ClosedPieceSet.from_clopen(f) if isinstance(f, ClopenSet) else f
    failures: list[str] = []

    if isinstance(c, GrowingClosedSet):
        c.extend_to_depth(depth)

    if isinstance(f, ClopenSet):
        # Exact containment: C must cover every cylinder of F.
        f_carried = all(c.covers(cyl) for cyl in f.cylinders)
    else:
        f_carried = all(any(q is p for q in c.pieces) for p in fs.pieces)
        if fs.core is not None and c.core is not fs.core:
            f_carried = False
    if not f_carried:
        failures.append("a piece or core of F is missing from C")

    fills_inside_m = True
    margins_ok = True
    for rec in c.fills:
        for p in rec.pieces:
            if not _piece_inside_m(p, m, rec.cylinder):
                fills_inside_m = False
                failures.append(f"fill {rec.index} at {rec.cylinder!r} escapes M")
        want = (Dyadic.one() - budget(rec.index)) * rec.m_measure_hi
        if rec.fill_measure < want:
            margins_ok = False
            failures.append(
                f"fill {rec.index} at {rec.cylinder!r}: measure "
                f"{rec.fill_measure} < (1-budget)·λ(M∩N_s) = {want}"
            )

    samples: list[tuple[str, Dyadic]] = []
    density_ok = True
    floor = Dyadic.one() - density_threshold
    for beta in _sample_f_points(fs):
        # Best certified lower bound on λ(C ∩ N_{β|l})·2^l over l ≤ depth,
        # from the pieces generated within the horizon.
        best = Dyadic.zero()
        for l in range(depth, 0, -1):
            ratio = c.measure_in(beta.prefix(l)).mul_pow2(l)
            if ratio > best:
                best = ratio
            if best >= floor:
                break
        samples.append((str(beta), best))
        if best < floor:
            density_ok = False
            failures.append(f"density of C at {beta} only ≥ {best} within depth {depth}")

    return InterpolationReport(
        f_carried, fills_inside_m, margins_ok, density_ok,
        tuple(samples), tuple(failures),
    )


def _piece_inside_m(p: Piece, m: MHandle, s: BitString) -> bool:
    size = p.measure_within_clopen(ClopenSet.full())
    if isinstance(m, ClopenSet):
        return p.measure_within_clopen(m) == size
    if isinstance(m, ClosedPieceSet):
        # Fill pieces are restrictions of M's own pieces; necessary exact
        # check: they cannot outweigh M inside their cylinder.
        return size <= m.measure_in(s)
    if isinstance(m, OpenSetStream):
        if m.complement_of is not None:
            # M = complement of the target; a stage-complement chunk misses
            # stage(k) ⊇ target by construction.  Anything else must avoid
            # the target's stages, checked against the deepest cheap stage.
            if isinstance(p, StageComplementChunk) and p.gdelta is m.complement_of:
                return True
            return p.measure_within_clopen(m.complement_of.stage(3)) == 0
        acc = ClopenSet.empty()
        h = 0
        while h <= _SEARCH_CAP:
            if p.measure_within_clopen(acc) == size:
                return True
            nxt = m.piece(h)
            if nxt is None:
                break
            acc = acc.union(nxt)
            h += 1
        return p.measure_within_clopen(acc) == size
    return False


def _sample_f_points(fs: ClosedPieceSet, cap: int = 8) -> list[Point]:
    pts: list[Point] = []
    if fs.core is not None:
        beta = getattr(fs.core, "point", None)
        if isinstance(beta, Point):
            pts.append(beta)
    for p in fs.pieces:
        if len(pts) >= cap:
            break
        if isinstance(p, ClopenPiece):
            for cyl in p.clopen.cylinders[:2]:
                pts.append(_leftmost_point(cyl))
        elif isinstance(p, StageComplementChunk):
            cand = _leftmost_point(p.support)
            if p.contains_point(cand):
                pts.append(cand)
        elif isinstance(p, DifferencePiece):
            for cyl in p.positive.cylinders[:1]:
                cand = _leftmost_point(cyl)
                if p.contains_point(cand):
                    pts.append(cand)
    return pts[:cap]


# ---------------------------------------------------------------------------
# graded separators


class TauFunction:
    """A density-continuous [0,1] function presented by evaluator and exact
    cylinder means.  Both return closed dyadic intervals [lo, hi] with
    hi - lo ≤ precision (often exact, lo == hi)."""

    def evaluate(self, beta: Point, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        raise NotImplementedError

    def mean_in(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        raise NotImplementedError


def _precision_exponent(precision: Dyadic) -> int:
    if precision <= 0:
        raise ValueError("precision must be positive")
    n = 0
    while Dyadic.pow2(-n) > precision:
        n += 1
    return n


class SeparatorFunction(TauFunction):
    """h = 1 on the target G, 0 on the closed set C, graded in between by
    the dyadic level family: h(β) = 1 - sup{ζ : β ∈ C_ζ}.

    Levels C_ζ are built lazily: the backbone C_{1/2^m} interpolates between
    (previous backbone ∪ exhaustion stage m) and the complement of G, and
    each in-between dyadic gets an interpolant between its two neighbours at
    the coarser denominator.  Every level is denotationally clopen, so
    membership and level measures are exact; the only inexactness in h is
    the grading granularity 2^(-n) itself.
    """

    def __init__(
        self,
        c: Union[ClopenSet, ClosedPieceSet],
        g: GDeltaSet,
        exhaustion: Optional[Callable[[int], ClopenSet]] = None,
    ) -> None:
        self.c = ClosedPieceSet.from_clopen(c) if isinstance(c, ClopenSet) else c
        self.g = g
        self._m = OpenSetStream.complement_of_target(g)
        self._exhaustion = exhaustion
        self._levels: dict[tuple[int, int], ClosedPieceSet] = {}
        self._backbone: list[ClosedPieceSet] = []

    def _exhaustion_clopen(self, n: int) -> ClopenSet:
        if self._exhaustion is not None:
            return self._exhaustion(n)
        # Default: complement of stage(n); together with C (already inside
        # every backbone level) this is the canonical exhaustion C ∪ ¬stage(n).
        return self.g.stage(n).complement()

    def backbone(self, m: int) -> ClosedPieceSet:
        while len(self._backbone) <= m:
            i = len(self._backbone)
            if i == 0:
                f: ClosedPieceSet = self.c  # ¬stage(0) is empty
            else:
                f = self._backbone[i - 1].union_with_clopen(self._exhaustion_clopen(i))
            self._backbone.append(lusin_menchoff(f, self._m))
        return self._backbone[m]

    def level(self, num, denom_exp: Optional[int] = None) -> ClosedPieceSet:
        """C_ζ for ζ = num / 2^denom_exp ∈ (0, 1]; also accepts a single
        Dyadic argument level(p)."""
        if denom_exp is None:
            if not isinstance(num, Dyadic):
                raise TypeError("level(p) expects a Dyadic or (num, denom_exp)")
            num, denom_exp = num.num, num.exp
        if not 0 < num <= (1 << denom_exp):
            raise ValueError(f"level {num}/2^{denom_exp} outside (0,1]")
        while num % 2 == 0:
            num //= 2
            denom_exp -= 1
        if num == 1:
            return self.backbone(denom_exp)
        key = (num, denom_exp)
        hit = self._levels.get(key)
        if hit is None:
            # Interpolate between the two neighbours at the coarser grid:
            # F is the smaller set (higher level), M the larger (lower).
            f = self.level((num + 1) // 2, denom_exp - 1)
            m = self.level((num - 1) // 2, denom_exp - 1)
            hit = lusin_menchoff(f, m)
            self._levels[key] = hit
        return hit

    def evaluate(self, beta: Point, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        if self.g.exit_stage(beta) is None:
            return Dyadic.one(), Dyadic.one()
        n = _precision_exponent(precision)
        # Largest j with beta ∈ C_{j/2^n}; membership is monotone in j.
        lo_j, hi_j = 0, 1 << n
        if not self.level(1, n).contains_point(beta):
            best = 0
        elif self.level(hi_j, n).contains_point(beta):
            best = hi_j
        else:
            # invariant: in at lo_j (or lo_j == 0), out at hi_j
            lo_j = 1
            while hi_j - lo_j > 1:
                mid = (lo_j + hi_j) // 2
                if self.level(mid, n).contains_point(beta):
                    lo_j = mid
                else:
                    hi_j = mid
            best = lo_j
        if best == 1 << n:
            return Dyadic.zero(), Dyadic.zero()  # beta ∈ C_1 ⊇ C: h = 0 exactly
        sup_lo = Dyadic(best, n)
        sup_hi = Dyadic(best + 1, n)
        lo = Dyadic.one() - sup_hi
        hi = Dyadic.one() - sup_lo
        if lo < 0:
            lo = Dyadic.zero()
        return lo, hi

    def mean_in(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        """Exact layer-cake bracketing of the cylinder mean: summing the
        (exact) relative measures of the 2^n levels pins the mean of the
        level profile to within one grading step 2^(-n)."""
        n = _precision_exponent(precision)
        rel = Dyadic.zero()
        for j in range(1, (1 << n) + 1):
            rel = rel + self.level(j, n).measure_in(s)
        profile_lo = rel.mul_pow2(len(s) - n)  # lower bound on mean of sup-level
        hi = Dyadic.one() - profile_lo
        lo = hi - Dyadic.pow2(-n)
        if lo < 0:
            lo = Dyadic.zero()
        return lo, hi


def urysohn(
    c: Union[ClopenSet, ClosedPieceSet],
    g: GDeltaSet,
    exhaustion: Optional[Callable[[int], ClopenSet]] = None,
) -> SeparatorFunction:
    """Graded separator between a closed set C and a measure-zero target G
    (disjoint from C): 1 on G, 0 on C, density-continuous."""
    return SeparatorFunction(c, g, exhaustion)


class StepFunction(TauFunction):
    """Depth-d step function: constant on each length-d cylinder.  All
    means are exact dyadics (averages of 2^k dyadic values)."""

    def __init__(self, depth: int, values: Sequence[Dyadic]) -> None:
        if len(values) != 1 << depth:
            raise ValueError(f"need 2^{depth} values, got {len(values)}")
        for v in values:
            if v < 0 or v > 1:
                raise ValueError(f"step value {v} outside [0,1]")
        self.depth = depth
        self.values = list(values)

    def value_at_leaf(self, t: BitString) -> Dyadic:
        if len(t) < self.depth:
            raise ValueError("below step resolution")
        p = t.prefix(self.depth)
        return self.values[p.v]

    def evaluate(self, beta: Point, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        v = self.values[beta.prefix(self.depth).v]
        return v, v

    def mean_in(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        v = self.mean_exact(s)
        return v, v

    def mean_exact(self, s: BitString) -> Dyadic:
        if len(s) >= self.depth:
            return self.values[s.prefix(self.depth).v]
        shift = self.depth - len(s)
        base = s.v << shift
        total = Dyadic.zero()
        for i in range(1 << shift):
            total = total + self.values[base + i]
        return total.mul_pow2(-shift)


def mean_value(
    h: TauFunction, s: BitString, precision: Dyadic
) -> tuple[Dyadic, Dyadic]:
    """Cylinder mean of h over N_s as a closed interval of width ≤ precision."""
    return h.mean_in(s, precision)


def mean_trace(
    h: TauFunction, beta: Point, depth: int, precision: Dyadic
) -> list[tuple[int, Dyadic, Dyadic]]:
    """Means along the branch: rows (l, lo, hi) for l = 0..depth."""
    return [
        (l, *h.mean_in(beta.prefix(l), precision)) for l in range(depth + 1)
    ]
