"""Matroid partition.

``solve_partition`` decides whether a set can be split into one independent
set per matroid.  It grows a partial partition element by element; to place a
new element it runs a breadth-first search over single-element exchanges: an
element y can enter class i directly if the class stays independent, and
otherwise every member of the unique circuit of (class i) + y could be
evicted to make room.  Following a shortest chain of such exchanges either
places the element or, when the search is exhausted, the set of reached
elements is a certified violation of the counting bound

    |A| <= sum_i r_i(A),

because every reached element lies in the span of (class i) intersected with
the reached set, for every i.

``rank_bound_holds`` is the independent brute-force oracle for the same
bound, and ``tight_sets`` / ``min_tight_set`` / ``slack_elements`` expose the
lattice of subsets where the bound is tight when the last matroid is uniform.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import InternalError, InvalidMatroidError, PreconditionError, SizeLimitError
from .matroids import Matroid, UniformMatroid


@dataclass(frozen=True)
class PartitionProblem:
    matroids: tuple[Matroid, ...]

    def __post_init__(self):
        if not self.matroids:
            raise PreconditionError("a partition problem needs at least one matroid")
        ground = self.matroids[0].ground
        if any(M.ground != ground for M in self.matroids):
            raise PreconditionError("all matroids must share the same ground set")

    @property
    def ground(self):
        return self.matroids[0].ground

    @property
    def m(self) -> int:
        return len(self.matroids)


@dataclass(frozen=True)
class PartitionCertificate:
    parts: tuple[frozenset, ...]

    def validate(self, problem: PartitionProblem, subset=None) -> bool:
        target = (
            frozenset(problem.ground.labels)
            if subset is None
            else problem.ground.check_subset(subset)
        )
        if len(self.parts) != problem.m:
            return False
        seen: set = set()
        for part, M in zip(self.parts, problem.matroids):
            if part & seen:
                return False
            seen |= part
            if not M.is_independent(part):
                return False
        return seen == target


@dataclass(frozen=True)
class DeficiencyWitness:
    A: frozenset
    size: int
    bound: int

    def validate(self, problem: PartitionProblem) -> bool:
        bound = sum(M.rank(self.A) for M in problem.matroids)
        return self.size == len(self.A) and self.bound == bound and self.size > bound


def _fundamental_circuit(M: Matroid, clazz: frozenset, y: int) -> frozenset:
    """Unique circuit inside clazz + y, given clazz independent and the union not."""
    D = clazz | {y}
    circuit = frozenset(z for z in D if M.is_independent(D - {z}))
    if not circuit:
        raise InvalidMatroidError(
            "independence oracle is inconsistent: a dependent set became "
            "independent by removing nothing (hereditary axiom violated)"
        )
    return circuit


def _augment(matroids, classes, color, e):
    """Try to place e; returns None on success, else the reached element set."""
    parent: dict[int, tuple[int, int]] = {}
    visited = {e}
    queue = deque([e])
    while queue:
        y = queue.popleft()
        ycls = color.get(y)
        for i, M in enumerate(matroids):
            if i == ycls:
                continue
            if M.is_independent(classes[i] | {y}):
                _apply_chain(matroids, classes, color, parent, y, i)
                return None
            circuit = _fundamental_circuit(M, classes[i], y)
            for z in sorted(circuit - {y}):
                if z not in visited:
                    visited.add(z)
                    parent[z] = (y, i)
                    queue.append(z)
    return frozenset(visited)


def _apply_chain(matroids, classes, color, parent, terminal, dest):
    moves = []
    cur, target = terminal, dest
    while True:
        src = color.get(cur)
        moves.append((cur, src, target))
        if src is None:
            break
        pred, cls = parent[cur]
        if cls != src:
            raise InternalError("exchange chain lost track of class membership")
        cur, target = pred, src
    touched = set()
    for element, src, dst in moves:
        if src is not None:
            classes[src].discard(element)
            touched.add(src)
        classes[dst].add(element)
        color[element] = dst
        touched.add(dst)
    for i in touched:
        if not matroids[i].is_independent(classes[i]):
            raise InvalidMatroidError(
                "augmentation left a dependent class; the independence "
                "oracle is inconsistent with the matroid axioms"
            )


def solve_partition(problem: PartitionProblem, subset=None, max_size: int = 64):
    """Partition ``subset`` (default: the full ground set) across the matroids.

    Returns a PartitionCertificate, or a DeficiencyWitness violating the
    counting bound.  Both are re-validated before they are returned.
    """
    S = (
        frozenset(problem.ground.labels)
        if subset is None
        else problem.ground.check_subset(subset)
    )
    if len(S) > max_size:
        raise SizeLimitError(f"partition limited to {max_size} elements, got {len(S)}")
    classes = [set() for _ in problem.matroids]
    color: dict[int, int] = {}
    for e in sorted(S):
        reached = _augment(problem.matroids, classes, color, e)
        if reached is not None:
            bound = sum(M.rank(reached) for M in problem.matroids)
            witness = DeficiencyWitness(A=reached, size=len(reached), bound=bound)
            if not witness.validate(problem):
                raise InvalidMatroidError(
                    "search exhausted but the reached set does not violate the "
                    "counting bound; independence oracle inconsistent"
                )
            return witness
    cert = PartitionCertificate(parts=tuple(frozenset(c) for c in classes))
    if not cert.validate(problem, S):
        raise InvalidMatroidError("constructed partition failed self-validation")
    return cert


def rank_bound_holds(problem: PartitionProblem, subset=None, max_size: int = 20):
    """Brute-force check of |A| <= sum_i r_i(A) over every subset.

    Returns True when the bound always holds; otherwise a DeficiencyWitness of
    maximal deficiency (ties broken by size, then lexicographically).
    """
    S = (
        frozenset(problem.ground.labels)
        if subset is None
        else problem.ground.check_subset(subset)
    )
    if len(S) > max_size:
        raise SizeLimitError(
            f"brute-force bound check limited to {max_size} elements, got {len(S)}"
        )
    elems = sorted(S)
    best = None
    best_deficiency = 0
    for r in range(1, len(elems) + 1):
        for combo in combinations(elems, r):
            A = frozenset(combo)
            bound = sum(M.rank(A) for M in problem.matroids)
            deficiency = len(A) - bound
            if deficiency > best_deficiency:
                best_deficiency = deficiency
                best = DeficiencyWitness(A=A, size=len(A), bound=bound)
    return True if best is None else best


def _last_uniform(problem: PartitionProblem) -> UniformMatroid:
    last = problem.matroids[-1]
    if not isinstance(last, UniformMatroid):
        raise PreconditionError("the last matroid must be uniform for tight-set queries")
    return last


def tight_sets(problem: PartitionProblem, max_size: int = 20) -> frozenset:
    """All subsets where |A| equals l plus the rank sum of the other matroids.

    Requires the problem to be partitionable and the full ground set itself to
    be tight; under those hypotheses the family is closed under union and
    intersection.
    """
    last = _last_uniform(problem)
    others = problem.matroids[:-1]
    elems = sorted(problem.ground.labels)
    if len(elems) > max_size:
        raise SizeLimitError(f"tight-set enumeration limited to {max_size} elements")
    if isinstance(solve_partition(problem), DeficiencyWitness):
        raise PreconditionError("no partition exists; tight-set family is undefined")

    def is_tight(A: frozenset) -> bool:
        return len(A) == last.l + sum(M.rank(A) for M in others)

    if not is_tight(frozenset(elems)):
        raise PreconditionError("the full ground set is not tight")
    out = []
    for r in range(0, len(elems) + 1):
        for combo in combinations(elems, r):
            A = frozenset(combo)
            if is_tight(A):
                out.append(A)
    return frozenset(out)


def min_tight_set(problem: PartitionProblem, max_size: int = 20) -> frozenset:
    """Intersection of all tight sets; verified to be tight itself."""
    family = tight_sets(problem, max_size=max_size)
    result = frozenset(problem.ground.labels)
    for A in family:
        result &= A
    if result not in family:
        raise InternalError("tight-set family is not closed under intersection")
    return result


def slack_elements(problem: PartitionProblem, max_size: int = 64) -> frozenset:
    """Elements that some valid partition places in the last (uniform) part.

    Decided per element b by deleting b and lowering the uniform rank by one:
    the reduced problem partitions exactly when b can occupy a uniform slot.
    """
    last = _last_uniform(problem)
    if last.l < 1:
        raise PreconditionError("slack elements need a uniform part of rank >= 1")
    full = solve_partition(problem, max_size=max_size)
    if isinstance(full, DeficiencyWitness):
        raise PreconditionError("no partition of the full ground set exists")
    n = problem.ground.n
    reduced = PartitionProblem(
        matroids=problem.matroids[:-1] + (UniformMatroid(last.l - 1, n),)
    )
    ground = frozenset(problem.ground.labels)
    members = []
    for b in sorted(ground):
        res = solve_partition(reduced, subset=ground - {b}, max_size=max_size)
        if isinstance(res, PartitionCertificate):
            members.append(b)
    return frozenset(members)
