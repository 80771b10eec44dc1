"""Systems of labels, strong and good decompositions, and their equivalence.

A *system* is a multiset of ground-set labels stored as a dense nonnegative
integer vector.  Relative to a matroid of rank k and a number of blocks m:

  * a *base* is a k-system whose support is a maximal independent set
    (all multiplicities 0/1);
  * a *strong decomposition* of an (mk+l)-system is a split into m bases
    plus an l-system remainder; existence is decided by lifting the matroid
    to one lift element per multiplicity unit and running matroid partition;
  * a *good decomposition* of T splits it as T1 + T2 with T2 a strong
    (mk+1)-system;
  * two good decompositions are *locally related* when their second members
    admit strong decompositions sharing all m bases, and *equivalent* when a
    chain of local relations connects them.

``equivalence_report`` materializes the graph of good decompositions with
local relations as edges; ``descent_move`` constructs, from two distinct good
decompositions, the explicit exchange that brings their second members
strictly closer in the l1 metric while staying inside one equivalence class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, cached_property
from itertools import combinations, permutations

from .errors import (
    ArityError,
    InternalError,
    PreconditionError,
    SizeLimitError,
)
from .matroids import LiftedMatroid, Matroid, UniformMatroid
from .partition import DeficiencyWitness, PartitionProblem, solve_partition


@dataclass(frozen=True)
class Context:
    """A matroid together with the number of base blocks m."""

    matroid: Matroid
    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise PreconditionError(f"need m >= 1, got {self.m!r}")
        if self.matroid.full_rank < 1:
            raise PreconditionError("the matroid must have rank >= 1")

    @property
    def n(self) -> int:
        return self.matroid.ground.n

    @cached_property
    def k(self) -> int:
        return self.matroid.full_rank

    def system(self, mult) -> "System":
        return System(self, tuple(int(v) for v in mult))

    def unit(self, j: int) -> "System":
        self.matroid.ground.check_subset([j])
        return System(self, tuple(1 if i == j else 0 for i in self.matroid.ground.labels))

    def zero(self) -> "System":
        return System(self, (0,) * self.n)

    @cached_property
    def base_systems(self) -> tuple["System", ...]:
        """All bases of the matroid as 0/1 systems, in lexicographic order."""
        out = []
        for B in self.matroid.bases():
            out.append(System(self, tuple(1 if j in B else 0 for j in self.matroid.ground.labels)))
        return tuple(sorted(out, key=lambda s: s.mult))


@dataclass(frozen=True)
class System:
    """A multiset of labels as a dense multiplicity vector."""

    ctx: Context
    mult: tuple[int, ...]

    def __post_init__(self):
        if len(self.mult) != self.ctx.n:
            raise ArityError(
                f"multiplicity vector has length {len(self.mult)}, ground set has {self.ctx.n}"
            )
        if any(not isinstance(v, int) or v < 0 for v in self.mult):
            raise ArityError("multiplicities must be nonnegative integers")

    @property
    def total(self) -> int:
        return sum(self.mult)

    @property
    def support(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.mult, start=1) if v)

    def __call__(self, j: int) -> int:
        return self.mult[j - 1]

    def __add__(self, other: "System") -> "System":
        self._check_ctx(other)
        return System(self.ctx, tuple(a + b for a, b in zip(self.mult, other.mult)))

    def try_sub(self, other: "System"):
        self._check_ctx(other)
        diff = tuple(a - b for a, b in zip(self.mult, other.mult))
        if any(v < 0 for v in diff):
            return None
        return System(self.ctx, diff)

    def __sub__(self, other: "System") -> "System":
        result = self.try_sub(other)
        if result is None:
            raise ArityError("subtraction would produce negative multiplicities")
        return result

    def leq(self, other: "System") -> bool:
        self._check_ctx(other)
        return all(a <= b for a, b in zip(self.mult, other.mult))

    def _check_ctx(self, other: "System"):
        if self.ctx != other.ctx:
            raise PreconditionError("systems belong to different contexts")

    def __repr__(self):
        return f"System{self.mult}"


def l1_distance(S: System, T: System) -> int:
    """Sum of absolute multiplicity differences; a metric on systems."""
    S._check_ctx(T)
    return sum(abs(a - b) for a, b in zip(S.mult, T.mult))


def is_base(T: System) -> bool:
    """True iff T is a 0/1 system on a maximal independent set of size k."""
    if T.total != T.ctx.k or any(v > 1 for v in T.mult):
        return False
    return T.ctx.matroid.is_independent(T.support)


@dataclass(frozen=True)
class StrongDecomposition:
    """m base parts (canonically sorted) plus an l-system remainder."""

    parts: tuple[System, ...]
    remainder: System

    @classmethod
    def make(cls, parts, remainder: System) -> "StrongDecomposition":
        return cls(parts=tuple(sorted(parts, key=lambda s: s.mult)), remainder=remainder)

    @property
    def total(self) -> System:
        out = self.remainder
        for p in self.parts:
            out = out + p
        return out

    def validate(self, T: System | None = None) -> bool:
        ctx = self.remainder.ctx
        if len(self.parts) != ctx.m:
            return False
        if not all(is_base(p) for p in self.parts):
            return False
        if T is not None and self.total != T:
            return False
        return True


@dataclass(frozen=True)
class SystemBoundViolation:
    """A subset B whose T-mass exceeds l + m * r(B)."""

    B: frozenset
    mass: int
    bound: int


def _lift_problem(T: System, l: int):
    """One lift element per multiplicity unit; m lifted copies plus a uniform tail."""
    ctx = T.ctx
    fmap = []
    for j, v in enumerate(T.mult, start=1):
        fmap.extend([j] * v)
    size = len(fmap)
    lifted = LiftedMatroid(ctx.matroid, size, tuple(fmap))
    matroids = (lifted,) * ctx.m + (UniformMatroid(l, size),)
    return PartitionProblem(matroids=matroids), tuple(fmap)


def _check_arity(T: System, l: int):
    if l < 0:
        raise ArityError(f"remainder size must be >= 0, got {l}")
    expected = T.ctx.m * T.ctx.k + l
    if T.total != expected:
        raise ArityError(f"|T| = {T.total} but m*k + l = {expected}")


@lru_cache(maxsize=65536)
def find_strong_decomposition(T: System, l: int):
    """A strong decomposition of the (mk+l)-system T, or None if none exists."""
    _check_arity(T, l)
    ctx = T.ctx
    problem, fmap = _lift_problem(T, l)
    result = solve_partition(problem)
    if isinstance(result, DeficiencyWitness):
        return None
    groups = []
    for part in result.parts:
        mult = [0] * ctx.n
        for e in part:
            mult[fmap[e - 1] - 1] += 1
        groups.append(ctx.system(mult))
    dec = StrongDecomposition.make(groups[: ctx.m], groups[ctx.m])
    if not dec.validate(T):
        raise InternalError("lifted partition produced an invalid strong decomposition")
    return dec


@lru_cache(maxsize=65536)
def strong_deficiency_witness(T: System, l: int):
    """A SystemBoundViolation showing T is not strong, or None if it is."""
    _check_arity(T, l)
    ctx = T.ctx
    problem, fmap = _lift_problem(T, l)
    result = solve_partition(problem)
    if not isinstance(result, DeficiencyWitness):
        return None
    B = frozenset(fmap[e - 1] for e in result.A)
    mass = sum(T(j) for j in B)
    bound = l + ctx.m * ctx.matroid.rank(B)
    if mass <= bound:
        raise InternalError("partition witness did not project to a bound violation")
    return SystemBoundViolation(B=B, mass=mass, bound=bound)


@lru_cache(maxsize=65536)
def enumerate_strong_decompositions(T: System, l: int) -> tuple[StrongDecomposition, ...]:
    """All strong decompositions of T, deduplicated up to reordering the bases."""
    _check_arity(T, l)
    ctx = T.ctx
    bases = [b for b in ctx.base_systems if b.leq(T)]
    out: list[StrongDecomposition] = []

    def rec(start: int, remaining: System, chosen: tuple[System, ...]):
        if len(chosen) == ctx.m:
            if remaining.total == l:
                out.append(StrongDecomposition(parts=chosen, remainder=remaining))
            return
        for idx in range(start, len(bases)):
            nxt = remaining.try_sub(bases[idx])
            if nxt is not None:
                rec(idx, nxt, chosen + (bases[idx],))

    rec(0, T, ())
    return tuple(out)


@dataclass(frozen=True)
class GoodDecomposition:
    """T = T1 + T2 with T2 a strong (mk+1)-system; identity is the pair only."""

    T1: System
    T2: System
    witness: StrongDecomposition = field(compare=False)

    @property
    def whole(self) -> System:
        return self.T1 + self.T2

    def validate(self) -> bool:
        ctx = self.T1.ctx
        return (
            self.T2.total == ctx.m * ctx.k + 1
            and self.witness.validate(self.T2)
            and self.witness.remainder.total == 1
        )


def _bounded_compositions(total: int, caps):
    """All tuples 0 <= t_i <= caps[i] with the given sum, in lexicographic order."""
    n = len(caps)

    def rec(i: int, remaining: int, prefix: tuple):
        if i == n - 1:
            if remaining <= caps[i]:
                yield prefix + (remaining,)
            return
        for v in range(min(remaining, caps[i]) + 1):
            yield from rec(i + 1, remaining - v, prefix + (v,))

    if n:
        yield from rec(0, total, ())


@lru_cache(maxsize=8192)
def all_good_decompositions(T: System, max_total: int = 24) -> tuple[GoodDecomposition, ...]:
    """Every good decomposition of T, ordered lexicographically by T2."""
    ctx = T.ctx
    need = ctx.m * ctx.k + 1
    if T.total < need:
        raise ArityError(f"|T| = {T.total} < m*k + 1 = {need}")
    if T.total > max_total:
        raise SizeLimitError(f"good-decomposition enumeration limited to |T| <= {max_total}")
    out = []
    for mult in _bounded_compositions(need, T.mult):
        T2 = ctx.system(mult)
        witness = find_strong_decomposition(T2, 1)
        if witness is not None:
            out.append(GoodDecomposition(T1=T - T2, T2=T2, witness=witness))
    return tuple(out)


def locally_related(d1: GoodDecomposition, d2: GoodDecomposition, ordered: bool = False) -> bool:
    """True iff some strong decompositions of d1.T2 and d2.T2 share all m bases.

    ``ordered`` matches the base parts index by index over all orderings; the
    unordered default matches them as multisets.  The two agree because the
    parts of a strong decomposition can be permuted freely.
    """
    if d1.whole != d2.whole:
        raise PreconditionError("good decompositions do not decompose the same system")
    for dec in enumerate_strong_decompositions(d1.T2, 1):
        if ordered:
            for perm in permutations(dec.parts):
                rem = d2.T2
                for p in perm:
                    nxt = rem.try_sub(p)
                    if nxt is None:
                        rem = None
                        break
                    rem = nxt
                if rem is not None:
                    return True
        else:
            shared = d1.T2 - dec.remainder
            if d2.T2.try_sub(shared) is not None:
                return True
    return False


@dataclass(frozen=True)
class EquivalenceReport:
    """The graph of good decompositions with local relations as edges."""

    nodes: tuple[GoodDecomposition, ...]
    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def component_count(self) -> int:
        return len(self.components)


def equivalence_report(T: System, ordered: bool = False, max_total: int = 24) -> EquivalenceReport:
    nodes = all_good_decompositions(T, max_total)
    edges = []
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if locally_related(nodes[i], nodes[j], ordered=ordered):
                edges.append((i, j))
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(nodes)):
        groups.setdefault(find(i), []).append(i)
    components = tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
    return EquivalenceReport(nodes=nodes, edges=tuple(edges), components=components)


def _require_strong(T: System, l: int):
    if find_strong_decomposition(T, l) is None:
        raise PreconditionError("the system is not strong for this remainder size")


def remainder_support(T: System, l: int) -> frozenset:
    """Labels that appear in the remainder of some strong decomposition of T.

    Decided per element: j qualifies iff T - [j] is strong with remainder
    size l - 1, which pushes the delete-one-element partition probe through
    the lift.
    """
    if l < 1:
        raise PreconditionError("remainder support needs l >= 1")
    _check_arity(T, l)
    _require_strong(T, l)
    out = []
    for j in sorted(T.support):
        if find_strong_decomposition(T - T.ctx.unit(j), l - 1) is not None:
            out.append(j)
    return frozenset(out)


def tight_subsets(T: System, l: int) -> frozenset:
    """Subsets B of supp T whose T-mass equals l + m * r(B)."""
    _check_arity(T, l)
    _require_strong(T, l)
    ctx = T.ctx
    supp = sorted(T.support)
    out = []
    for size in range(0, len(supp) + 1):
        for combo in combinations(supp, size):
            B = frozenset(combo)
            mass = sum(T(j) for j in B)
            if mass == l + ctx.m * ctx.matroid.rank(B):
                out.append(B)
    return frozenset(out)


def min_tight_subset(T: System, l: int) -> frozenset:
    """Intersection of all tight subsets; verified to be tight itself."""
    family = tight_subsets(T, l)
    result = T.support
    for B in family:
        result &= B
    if result not in family:
        raise InternalError("tight subsets are not closed under intersection")
    return result


@dataclass(frozen=True)
class RemainderAlternative:
    """Certified outcome of comparing remainders of two strong (mk+1)-systems.

    kind == "surplus": ``surplus`` is a strong decomposition of T whose
    remainder [i] satisfies T(i) > S(i).

    kind == "matched": ``matched`` maps every possible remainder label a of S
    to a strong decomposition of T with the same remainder [a].
    """

    kind: str
    surplus: StrongDecomposition | None = None
    matched: tuple[tuple[int, StrongDecomposition], ...] | None = None


def remainder_alternative(S: System, T: System) -> RemainderAlternative:
    """Decide which exchange alternative holds for strong (mk+1)-systems S, T."""
    _check_arity(S, 1)
    _check_arity(T, 1)
    _require_strong(S, 1)
    _require_strong(T, 1)
    ctx = T.ctx
    for i in sorted(remainder_support(T, 1)):
        if T(i) > S(i):
            rest = find_strong_decomposition(T - ctx.unit(i), 0)
            return RemainderAlternative(
                kind="surplus",
                surplus=StrongDecomposition.make(rest.parts, ctx.unit(i)),
            )
    matched = []
    for a in sorted(remainder_support(S, 1)):
        reduced = T.try_sub(ctx.unit(a))
        rest = None if reduced is None else find_strong_decomposition(reduced, 0)
        if rest is None:
            raise InternalError(
                "neither exchange alternative is certifiable; this contradicts "
                "the remainder exchange property and signals a bug"
            )
        matched.append((a, StrongDecomposition.make(rest.parts, ctx.unit(a))))
    return RemainderAlternative(kind="matched", matched=tuple(matched))


@dataclass(frozen=True)
class DescentMove:
    """One distance-decreasing exchange between two good decompositions."""

    case: str
    moved_t: GoodDecomposition
    moved_s: GoodDecomposition
    distance_before: int
    distance_after: int


def descent_move(dT: GoodDecomposition, dS: GoodDecomposition) -> DescentMove:
    """Construct the exchange that brings the second members strictly closer.

    Given two distinct good decompositions of the same system, returns new
    good decompositions (each locally related to its input) whose second
    members are at l1 distance exactly 2 less than before.
    """
    if dT.whole != dS.whole:
        raise PreconditionError("good decompositions do not decompose the same system")
    if dT == dS:
        raise PreconditionError("descent move needs two distinct good decompositions")
    ctx = dT.T1.ctx
    alt = remainder_alternative(dS.T2, dT.T2)
    before = l1_distance(dT.T2, dS.T2)
    if alt.kind == "surplus":
        i = min(alt.surplus.remainder.support)
        j = min(
            lbl
            for lbl in ctx.matroid.ground.labels
            if dT.T1(lbl) > dS.T1(lbl)
        )
        r1 = dT.T1 - ctx.unit(j) + ctx.unit(i)
        r2 = dT.T2 + ctx.unit(j) - ctx.unit(i)
        moved = GoodDecomposition(
            T1=r1,
            T2=r2,
            witness=StrongDecomposition.make(alt.surplus.parts, ctx.unit(j)),
        )
        after = l1_distance(r2, dS.T2)
        return DescentMove("surplus", moved_t=moved, moved_s=dS,
                           distance_before=before, distance_after=after)
    a, dec_t = alt.matched[0]
    dec_s = StrongDecomposition.make(
        find_strong_decomposition(dS.T2 - ctx.unit(a), 0).parts, ctx.unit(a)
    )
    b = min(l for l in ctx.matroid.ground.labels if dT.T1(l) > dS.T1(l))
    c = min(l for l in ctx.matroid.ground.labels if dT.T1(l) < dS.T1(l))
    r2 = dT.T2 + ctx.unit(b) - ctx.unit(a)
    moved_t = GoodDecomposition(
        T1=dT.T1 - ctx.unit(b) + ctx.unit(a),
        T2=r2,
        witness=StrongDecomposition.make(dec_t.parts, ctx.unit(b)),
    )
    q2 = dS.T2 + ctx.unit(c) - ctx.unit(a)
    moved_s = GoodDecomposition(
        T1=dS.T1 - ctx.unit(c) + ctx.unit(a),
        T2=q2,
        witness=StrongDecomposition.make(dec_s.parts, ctx.unit(c)),
    )
    return DescentMove("matched", moved_t=moved_t, moved_s=moved_s,
                       distance_before=before, distance_after=l1_distance(r2, q2))
