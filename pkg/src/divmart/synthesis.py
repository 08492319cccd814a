"""Martingale synthesis: stagewise construction for one measure-zero target,
the geometric union combinator, the full pipeline for finite unions, and the
embedding of step functions as exact martingale tables.

The stagewise build keeps, per stage n, an open region G*_n ⊆ stage(n) of
the target's presentation together with the antichain of *witness* cylinders
covering the target inside it.  The alternating sum S_n = Σ_{j≤n} (-1)^j g_j
of the region indicators is a step function whose cylinder means are exact
dyadics; the synthesized martingale is f(s) = ⨍_{N_s} lim S_n dλ, evaluated
by an even-index truncation ladder whose one-sided error is the relative
measure of the next-next region — again exact, so every evaluation is a
certified nested interval.

Two realizations of a region:
  * StageRegion — a whole presentation stage, queried through the target's
    closed-form geometry (never materialized; deep stages are astronomically
    wide antichains),
  * ClopenRegion — a materialized clopen set, used when per-witness stage
    choices differ (explicitly-listed targets).
Budget searches that cannot terminate (a stage that stops shrinking, a rate
too slow for the requested depth) raise HorizonExhausted with the failing
budget, never a silent wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .bits import EMPTY, BitString, Point
from .clopen import ClopenSet
from .dyadic import Dyadic
from .errors import HorizonExhausted
from .fine import StepFunction, TauFunction
from .sets import GDeltaSet, SigmaThreeSet
from .table import MartingaleTable

_STAGE_SEARCH_SPAN = 4096
_WITNESS_CAP = 4096


# ---------------------------------------------------------------------------
# open regions


class StageRegion:
    """G*-region equal to stage(m) of the target, answered in closed form."""

    def __init__(self, target: GDeltaSet, m: int) -> None:
        self.target = target
        self.m = m

    def measure_in(self, t: BitString) -> Dyadic:
        return self.target.measure_stage_in(self.m, t)

    @property
    def measure(self) -> Dyadic:
        return self.measure_in(EMPTY)

    def meets(self, t: BitString) -> bool:
        return self.measure_in(t) > 0

    def covers(self, t: BitString) -> bool:
        return self.measure_in(t) == Dyadic.pow2(-len(t))

    def contains_point(self, beta: Point) -> bool:
        return self.target.stage_cylinder_containing(self.m, beta) is not None

    def cylinder_containing(self, beta: Point) -> Optional[BitString]:
        return self.target.stage_cylinder_containing(self.m, beta)

    def max_len(self) -> int:
        return self.target.stage_max_len(self.m)

    def refutation_depth(self, beta: Point) -> int:
        return self.target.stage_refutation_depth(self.m, beta)

    def sample_cylinders(self, count: int) -> list[BitString]:
        return self.target.stage_sample(self.m, count)

    def cylinder_count(self) -> int:
        return self.target.stage_count(self.m)

    def materialize(self) -> ClopenSet:
        return self.target.stage(self.m)

    def __repr__(self) -> str:
        return f"StageRegion(stage={self.m})"


class ClopenRegion:
    """G*-region backed by a materialized clopen set."""

    def __init__(self, clopen: ClopenSet) -> None:
        self.clopen = clopen

    def measure_in(self, t: BitString) -> Dyadic:
        return self.clopen.measure_in(t)

    @property
    def measure(self) -> Dyadic:
        return self.clopen.measure

    def meets(self, t: BitString) -> bool:
        return self.clopen.meets(t)

    def covers(self, t: BitString) -> bool:
        return self.clopen.covers(t)

    def contains_point(self, beta: Point) -> bool:
        return self.clopen.contains_point(beta)

    def cylinder_containing(self, beta: Point) -> Optional[BitString]:
        return self.clopen.cylinder_containing(beta)

    def max_len(self) -> int:
        return self.clopen.max_len()

    def refutation_depth(self, beta: Point) -> int:
        for l in range(self.clopen.max_len() + 1):
            if not self.clopen.meets(beta.prefix(l)):
                return l
        raise ValueError("point is inside the region")

    def sample_cylinders(self, count: int) -> list[BitString]:
        return list(self.clopen.cylinders[:count])

    def cylinder_count(self) -> int:
        return len(self.clopen.cylinders)

    def materialize(self) -> ClopenSet:
        return self.clopen

    def __repr__(self) -> str:
        return f"ClopenRegion({self.clopen!r})"


Region = Union[StageRegion, ClopenRegion]


class IndicatorTau(TauFunction):
    """Indicator of a region whose boundary is (denotationally) clopen: a
    valid graded separator with exact evaluation and exact cylinder means.
    Equals 1 on the target inside the region and 0 off the region."""

    def __init__(self, region: Region) -> None:
        self.region = region

    def evaluate(self, beta: Point, precision: Dyadic = None) -> tuple[Dyadic, Dyadic]:
        v = Dyadic.one() if self.region.contains_point(beta) else Dyadic.zero()
        return v, v

    def mean_in(self, s: BitString, precision: Dyadic = None) -> tuple[Dyadic, Dyadic]:
        v = self.region.measure_in(s).mul_pow2(len(s))
        return v, v


# ---------------------------------------------------------------------------
# witnesses and certificates


class WitnessFamily:
    """The target-meeting antichain cylinders of a region: pairwise
    incompatible, and their union covers the target inside the region.
    Backed either by the region's canonical antichain (pruned on the fly) or
    by an explicitly enumerated tuple."""

    def __init__(
        self,
        region: Region,
        target: GDeltaSet,
        explicit: Optional[tuple[BitString, ...]] = None,
    ) -> None:
        self.region = region
        self.target = target
        self.explicit = explicit

    def containing(self, beta: Point) -> Optional[BitString]:
        if self.explicit is not None:
            for w in self.explicit:
                if beta.starts_with(w):
                    return w
            return None
        c = self.region.cylinder_containing(beta)
        if c is None or not self.target.meets_target(c):
            return None
        return c

    def sample(self, count: int) -> list[BitString]:
        if self.explicit is not None:
            return list(self.explicit[:count])
        out = []
        for c in self.region.sample_cylinders(count):
            if self.target.meets_target(c):
                out.append(c)
        return out

    def count(self) -> int:
        if self.explicit is not None:
            return len(self.explicit)
        if self.target.self_covering:
            return self.region.cylinder_count()
        return sum(
            1
            for c in self.region.sample_cylinders(self.region.cylinder_count())
            if self.target.meets_target(c)
        )

    def all(self, cap: int = _WITNESS_CAP) -> list[BitString]:
        n = self.count()
        if n > cap:
            raise HorizonExhausted(
                f"witness enumeration ({n} cylinders)",
                f"cap {cap}; use the closed-form queries instead",
            )
        if self.explicit is not None:
            return list(self.explicit)
        return [
            c
            for c in self.region.sample_cylinders(n)
            if self.target.meets_target(c)
        ]


@dataclass(repr=False)
class StageCertificate:
    """Stage n of the construction: the open region G*_n, its witness
    antichain (union = G**_n), and the sign this stage contributes to the
    alternating sum S_n.  Certificates chain through `prev`, so the whole
    region sequence G*_0 ⊇ … ⊇ G*_n is reachable from the newest one."""

    index: int
    gstar: Region
    witnesses: WitnessFamily
    stage_index: Optional[int]  # presentation stage realizing gstar, if any
    prev: Optional["StageCertificate"] = None

    @property
    def sign(self) -> int:
        return -1 if self.index % 2 else 1

    @property
    def g(self) -> IndicatorTau:
        """The stage separator g_n (1 on the target, 0 off G*_n)."""
        return IndicatorTau(self.gstar)

    @property
    def signed_combination(self) -> tuple[int, ...]:
        """Signs of S_n = Σ_{j≤n} (-1)^j g_j."""
        return tuple(1 if j % 2 == 0 else -1 for j in range(self.index + 1))

    def chain_region(self, j: int) -> Region:
        cert = self
        while cert.index > j:
            if cert.prev is None:
                raise ValueError(f"certificate chain broken below index {cert.index}")
            cert = cert.prev
        if cert.index != j:
            raise ValueError(f"no certificate at index {j}")
        return cert.gstar

    def partial_mean_at(self, w: BitString) -> Dyadic:
        """⨍_{N_w} S_n dλ computed through the chain, exact."""
        total = Dyadic.zero()
        for j in range(self.index + 1):
            r = self.chain_region(j).measure_in(w).mul_pow2(len(w))
            total = total + r if j % 2 == 0 else total - r
        return total

    def __repr__(self) -> str:
        return (
            f"StageCertificate(index={self.index}, gstar={self.gstar!r}, "
            f"stage_index={self.stage_index})"
        )


def _parity_value(n: int) -> Dyadic:
    """S_n(β) for β in the target: the alternating sum of n+1 ones."""
    return Dyadic.one() if n % 2 == 0 else Dyadic.zero()


_BUDGET_EXP_OFFSET = 3  # condition (5) threshold: 2^(-n-3)


def build_stage(prev: StageCertificate, target: GDeltaSet) -> StageCertificate:
    """Construct stage n+1 from stage n: choose for each witness s^n_j an
    open O_j = stage(m) ∩ N_{s^n_j} with λ(O_j) < 2^(-n-3)·λ(N_{s^n_j}),
    take G*_{n+1} = ⋃_j O_j, and read the new witnesses off its canonical
    antichain (every retained cylinder satisfies the mean-proximity
    condition exactly, since it lies inside all earlier regions)."""
    n = prev.index
    threshold = Dyadic.pow2(-n - _BUDGET_EXP_OFFSET)

    if target.self_covering and target.witness_uniform:
        rep_list = prev.witnesses.sample(1)
        if not rep_list:
            region: Region = ClopenRegion(ClopenSet.empty())
            return StageCertificate(
                n + 1, region, WitnessFamily(region, target), None, prev
            )
        rep = rep_list[0]
        start = max(n + 1, (prev.stage_index or 0) + 1)
        m = _find_stage_index(target, rep, threshold, start)
        region = StageRegion(target, m)
        cert = StageCertificate(n + 1, region, WitnessFamily(region, target), m, prev)
        _check_mean_proximity(cert, cert.witnesses.sample(1))
        return cert

    pieces = ClopenSet.empty()
    for w in prev.witnesses.all():
        m = _find_stage_index(target, w, threshold, n + 1)
        piece = target.stage(m).intersect(ClopenSet.cylinder(w))
        pieces = pieces.union(piece)
    region = ClopenRegion(pieces)
    candidates = tuple(c for c in pieces.cylinders if target.meets_target(c))
    cert = StageCertificate(
        n + 1, region, WitnessFamily(region, target, explicit=candidates), None, prev
    )
    _check_mean_proximity(cert, candidates)
    return cert


def _find_stage_index(
    target: GDeltaSet, w: BitString, threshold: Dyadic, start: int
) -> int:
    """Minimal m ≥ start with λ(stage(m) ∩ N_w) < threshold·λ(N_w)."""
    bound = threshold.mul_pow2(-len(w))
    frozen_from = getattr(target, "frozen_from", None)
    for m in range(start, start + _STAGE_SEARCH_SPAN):
        cur = target.measure_stage_in(m, w)
        if cur < bound:
            return m
        if frozen_from is not None and m >= frozen_from:
            break  # stages stopped shrinking; the budget is unreachable
    raise HorizonExhausted(
        f"stage budget λ(stage(m) ∩ N_{str(w) or 'ε'}) < {threshold}·2^-{len(w)}",
        f"no reachable stage index from {start} meets it",
    )


def _check_mean_proximity(cert: StageCertificate, witnesses: Sequence[BitString]) -> None:
    """Condition (6) at the new witnesses, exact through the chain: the mean
    of S_{n+1} over N_w must be strictly within 2^(-3) of the (parity) value
    S_{n+1} takes on the target.  Zero by construction for antichain
    cylinders nested in all earlier regions; kept as a hard check."""
    margin = Dyadic(1, 3)
    want = _parity_value(cert.index)
    for w in witnesses:
        err = abs(cert.partial_mean_at(w) - want)
        if not err < margin:
            raise ValueError(
                f"mean-proximity condition fails at witness {w!r}: error {err}"
            )


class SynthesizedMartingale:
    """Martingale with divergence set exactly the given measure-zero target.

    f(s) is approached from below by the exact truncation means
    M_k(s) = ⨍_{N_s} S_{k+1} dλ (k even), with one-sided error bounded by
    the relative measure of G*_{k+2} in N_s — also exact, so eval returns
    genuinely nested certified intervals.
    """

    def __init__(self, target: GDeltaSet) -> None:
        self.target = target
        region = StageRegion(target, 0)
        self._stages: list[StageCertificate] = [
            StageCertificate(0, region, WitnessFamily(region, target), 0)
        ]

    def stage(self, n: int) -> StageCertificate:
        while len(self._stages) <= n:
            self._stages.append(build_stage(self._stages[-1], self.target))
        return self._stages[n]

    def built_stages(self) -> int:
        return len(self._stages)

    # -- exact means ---------------------------------------------------

    def relative_measure(self, j: int, s: BitString) -> Dyadic:
        """λ(G*_j ∩ N_s) / λ(N_s), exact."""
        return self.stage(j).gstar.measure_in(s).mul_pow2(len(s))

    def partial_mean(self, k: int, s: BitString) -> Dyadic:
        """⨍_{N_s} S_k dλ = Σ_{j≤k} (-1)^j · relative_measure(j, s)."""
        total = Dyadic.zero()
        for j in range(k + 1):
            r = self.relative_measure(j, s)
            total = total + r if j % 2 == 0 else total - r
        return total

    def table_value(self, k: int, s: BitString) -> Dyadic:
        """M_k(s) = ⨍_{N_s} S_{k+1} dλ, the exact truncated table."""
        return self.partial_mean(k + 1, s)

    def eval(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        """Certified interval for f(s), width ≤ precision (exact when the
        region chain dies inside N_s)."""
        k = 0
        while True:
            err = self.relative_measure(k + 2, s)
            if err <= precision:
                lo = self.table_value(k, s)
                return lo, lo + err
            k += 2

    def truncated_table(self, k: int, depth: int) -> MartingaleTable:
        self.stage(k + 1)  # materialize the chain once
        return MartingaleTable.from_function(depth, lambda s: self.table_value(k, s))

    # -- witness-level checks -------------------------------------------

    def witness_mean_error(self, n: int, w: BitString) -> Dyadic:
        """|⨍_{N_w} S_n dλ − S_n(β on target)|, exact (condition (6))."""
        diff = self.partial_mean(n, w) - _parity_value(n)
        return abs(diff)

    def check_stage_conditions(self, n: int, sample_cap: int = 6) -> list[str]:
        """Finite-horizon audit of the construction conditions at stage n.
        Returns failure descriptions (empty = all pass)."""
        failures: list[str] = []
        cert = self.stage(n)
        ws = cert.witnesses.sample(sample_cap)
        stage_meas = self.target.measure_stage_in

        if n == 0:
            if not cert.gstar.covers(EMPTY):
                failures.append("G*_0 is not the full space")
        for w in ws:
            if not cert.gstar.covers(w):
                failures.append(f"witness {w!r} not inside G*_{n}")
            if stage_meas(n, w) != Dyadic.pow2(-len(w)):
                failures.append(f"witness {w!r} of G*_{n} escapes stage({n})")
            if not self.target.meets_target(w):
                failures.append(f"witness {w!r} misses the target")
            err = self.witness_mean_error(n, w)
            if not err < Dyadic(1, 3):
                failures.append(f"mean proximity fails at {w!r}: error {err}")
            nxt = self.relative_measure(n + 1, w)
            if not nxt < Dyadic.pow2(-n - _BUDGET_EXP_OFFSET):
                failures.append(
                    f"budget fails at {w!r}: λ(G*_{n+1}∩N_w)/λ(N_w) = {nxt}"
                )
        # region nesting at sampled witnesses of the next stage
        for w in self.stage(n + 1).witnesses.sample(sample_cap):
            if self.stage(n + 1).gstar.measure_in(w) > cert.gstar.measure_in(w):
                failures.append(f"G*_{n + 1} not inside G*_{n} at {w!r}")
        return failures


def gdelta_martingale(target: GDeltaSet) -> SynthesizedMartingale:
    """Martingale whose divergence set is exactly the denoted target, with
    oscillation 0 off it and ≥ 1/2 on it."""
    return SynthesizedMartingale(target)


# ---------------------------------------------------------------------------
# combination


class ConstantPart:
    """Degenerate part: the constant martingale c (converges everywhere)."""

    def __init__(self, c: Dyadic) -> None:
        if not (Dyadic.zero() <= c <= Dyadic.one()):
            raise ValueError("constant part must lie in [0,1]")
        self.c = c

    def eval(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        return self.c, self.c

    def table_value(self, k: int, s: BitString) -> Dyadic:
        return self.c


Part = Union[SynthesizedMartingale, ConstantPart]

SCALE = Dyadic(3, 2)  # 3/4: brings Σ 4^(-n)·[0,1] = [0, 4/3] back into [0,1]


class CombinedMartingale:
    """f = (3/4)·Σ_n 4^(-n)·f_n over the listed parts, extended by an exact
    constant tail (all further parts ≡ tail_constant; zero when omitted).
    Values stay in [0,1]; a point diverges iff some part diverges there, at
    scaled oscillation ≥ 4^(-m)/8 for the minimal divergent index m."""

    def __init__(self, parts: Sequence[Part], tail_constant: Optional[Dyadic] = None):
        self.parts = list(parts)
        if tail_constant is not None and not (
            Dyadic.zero() <= tail_constant <= Dyadic.one()
        ):
            raise ValueError("tail constant must lie in [0,1]")
        self.tail_constant = tail_constant

    def _tail_value(self) -> Dyadic:
        """(3/4)·Σ_{n≥N} 4^(-n)·c = c·4^(-N), exact."""
        if self.tail_constant is None:
            return Dyadic.zero()
        return self.tail_constant.mul_pow2(-2 * len(self.parts))

    def eval(self, s: BitString, precision: Dyadic) -> tuple[Dyadic, Dyadic]:
        if precision <= 0:
            raise ValueError("precision must be positive")
        lo = hi = self._tail_value()
        for n, part in enumerate(self.parts):
            # per-part slack 2^(n-1)·precision keeps the scaled sum under it
            plo, phi = part.eval(s, precision.mul_pow2(n - 1))
            lo = lo + (plo * SCALE).mul_pow2(-2 * n)
            hi = hi + (phi * SCALE).mul_pow2(-2 * n)
        return lo, hi

    def table_value(self, k: int, s: BitString) -> Dyadic:
        total = self._tail_value()
        for n, part in enumerate(self.parts):
            total = total + (part.table_value(k, s) * SCALE).mul_pow2(-2 * n)
        return total

    def truncated_table(self, k: int, depth: int) -> MartingaleTable:
        return MartingaleTable.from_function(depth, lambda s: self.table_value(k, s))


def union_combine(
    parts: Sequence[Part], tail_constant: Optional[Dyadic] = None
) -> CombinedMartingale:
    """Combine the parts into one martingale diverging exactly where some
    part diverges.  Finite lists are zero-extended unless a constant tail is
    given; an empty list yields the constant martingale tail_constant (or 0)."""
    return CombinedMartingale(parts, tail_constant)


def sigma3_pipeline(b: SigmaThreeSet) -> CombinedMartingale:
    """The full construction: one stagewise part per component of the finite
    union, combined geometrically."""
    return union_combine([gdelta_martingale(c) for c in b.components])


# ---------------------------------------------------------------------------
# embedding of step functions


class EmbeddedMartingale:
    """φ(h)(s) = ⨍_{N_s} h dλ for a depth-d step function h: exact at every
    node, constant below depth d, and recovering h as its limit function."""

    def __init__(self, step: StepFunction) -> None:
        self.step = step
        self.depth = step.depth

    def value(self, s: BitString) -> Dyadic:
        return self.step.mean_exact(s)

    def eval(self, s: BitString, precision: Dyadic = None) -> tuple[Dyadic, Dyadic]:
        v = self.value(s)
        return v, v

    def table_value(self, k: int, s: BitString) -> Dyadic:
        return self.value(s)

    def truncated_table(self, k: int, depth: int) -> MartingaleTable:
        return MartingaleTable.from_function(depth, self.value)

    def table(self, depth: int) -> MartingaleTable:
        return MartingaleTable.from_function(depth, self.value)


def embed_continuous(h: StepFunction) -> EmbeddedMartingale:
    return EmbeddedMartingale(h)
