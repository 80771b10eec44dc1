"""Flat-frame structures: axiom verification and potential construction.

A FlatFrameStructure gives numerical access to a bundle with commuting Higgs
endomorphisms C_i, a flat m-linear form S, and a unit section, expressed in a
frame of flat sections; all evaluators are plain functions of the base point
z.  The matroid singles out the index sets I for which the iterated sections
C_I (unit) are flat, i.e. have z-constant coordinates in the working frame.

``first_kind_polynomial`` builds the homogeneous degree-mk polynomial whose
mixed derivatives along m maximal independent sets reproduce S on the
corresponding flat sections.  ``second_kind_truncation`` builds the Taylor
table of the second-kind potential: the coefficient of (z-x)^T is computed
from every good decomposition T = T1 + T2 as

    a_T(T1, T2) = (1/T!) * (d^T1 S(C_T2 unit, unit, ..., unit))(x),

the spread across decompositions is recorded (it vanishes for a genuine
structure), and the mean is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any, Callable

import numpy as np

from .errors import FlatnessError, PreconditionError, StructureError, WellDefinednessError
from .findiff import default_step, multi_partial
from .matroids import Matroid
from .systems import (
    Context,
    System,
    _bounded_compositions,
    all_good_decompositions,
    find_strong_decomposition,
)


@dataclass
class FlatFrameStructure:
    """Evaluator bundle for a structure of order (n, k, m) with mu-dim fibers.

    higgs(i, z) returns the mu x mu matrix of C_i at z (labels are 1-based),
    unit(z) the coordinates of the unit section, form(z) the m-linear form as
    an array of shape (mu,) * m; all in the working frame.  frame_flat states
    that the provider promises the working frame consists of flat sections
    (then the form and all flat-section coordinates are z-independent, which
    is exactly what verify_axioms tests).
    """

    matroid: Matroid
    m: int
    basepoint: np.ndarray
    mu: int
    higgs: Callable[[int, np.ndarray], np.ndarray]
    unit: Callable[[np.ndarray], np.ndarray]
    form: Callable[[np.ndarray], np.ndarray]
    frame_flat: bool = True
    backend: Any = None

    def __post_init__(self):
        self.basepoint = np.asarray(self.basepoint, dtype=complex)
        if self.m < 1:
            raise PreconditionError("need m >= 1")

    @property
    def n(self) -> int:
        return self.matroid.ground.n

    @property
    def k(self) -> int:
        return self.matroid.full_rank

    @property
    def order(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.m)

    def context(self) -> Context:
        return Context(self.matroid, self.m)

    def maximal_independent_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(B)) for B in self.matroid.bases())

    def scale(self) -> float:
        return float(np.max(np.abs(self.basepoint))) if self.basepoint.size else 0.0


class _EvalCache:
    """Memoizes higgs/unit/form evaluations per base point z."""

    def __init__(self, structure: FlatFrameStructure):
        self.structure = structure
        self._data: dict = {}

    def at(self, z):
        zz = np.asarray(z, dtype=complex)
        key = tuple(zz.tolist())
        hit = self._data.get(key)
        if hit is None:
            F = self.structure
            H = [np.asarray(F.higgs(i, zz), dtype=complex) for i in F.matroid.ground.labels]
            u = np.asarray(F.unit(zz), dtype=complex)
            W = np.asarray(F.form(zz), dtype=complex)
            hit = self._data[key] = (H, u, W)
        return hit


def _contract(form_tensor, vectors):
    out = form_tensor
    for v in vectors:
        out = np.tensordot(out, v, axes=([0], [0]))
    return complex(out)


def _apply_powers(H, mult, vec):
    v = vec
    for j, e in enumerate(mult):
        for _ in range(e):
            v = H[j] @ v
    return v


def _apply_subset(H, labels, vec):
    v = vec
    for i in labels:
        v = H[i - 1] @ v
    return v


def _apply_slot(W, M, slot):
    out = np.tensordot(W, M, axes=([slot], [0]))
    return np.moveaxis(out, -1, slot)


def pairing_with_unit(cache: _EvalCache, t2_mult, z) -> complex:
    """S(C_{T2} unit, unit, ..., unit) evaluated at z."""
    H, u, W = cache.at(z)
    v = _apply_powers(H, t2_mult, u)
    return _contract(W, [v] + [u] * (cache.structure.m - 1))


@dataclass
class AxiomReport:
    commutativity: float
    integrability: float
    higgs_invariance: float
    section_flatness: float
    form_flatness: float
    samples: int
    h: float

    @property
    def max_violation(self) -> float:
        return max(
            self.commutativity,
            self.integrability,
            self.higgs_invariance,
            self.section_flatness,
            self.form_flatness,
        )

    def as_dict(self) -> dict:
        return {
            "commutativity": self.commutativity,
            "integrability": self.integrability,
            "higgs_invariance": self.higgs_invariance,
            "section_flatness": self.section_flatness,
            "form_flatness": self.form_flatness,
            "max_violation": self.max_violation,
            "samples": self.samples,
            "h": self.h,
        }


def _maxabs(arr) -> float:
    arr = np.asarray(arr)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def verify_axioms(
    structure: FlatFrameStructure,
    samples,
    h: float | None = None,
    use_richardson: bool = True,
    hard_threshold: float | None = 1e-3,
) -> AxiomReport:
    """Measure the worst violation of the structure axioms at the samples.

    Reports maxima of (a) Higgs commutators, (b) the integrability defect
    d_i C_j - d_j C_i from central differences, (c) the form's Higgs
    invariance across slots, (d) flatness of the sections C_I(unit) for all
    maximal independent I, and (e) flatness of the form itself.  Raises
    StructureError when the worst violation exceeds ``hard_threshold``.
    """
    F = structure
    cache = _EvalCache(F)
    if h is None:
        h = default_step(F.scale(), order=1)
    n, m = F.n, F.m
    max_inds = F.maximal_independent_sets()

    def fd(fun, z, i):
        def g(step):
            zp = np.array(z, dtype=complex)
            zm = zp.copy()
            zp[i] += step
            zm[i] -= step
            return (fun(zp) - fun(zm)) / (2.0 * step)

        coarse = g(h)
        if not use_richardson:
            return coarse
        return (4.0 * g(h / 2.0) - coarse) / 3.0

    comm = integ = invari = sect = formflat = 0.0
    count = 0
    for z in samples:
        z = np.asarray(z, dtype=complex)
        count += 1
        H, u, W = cache.at(z)
        for a in range(n):
            for b in range(a + 1, n):
                comm = max(comm, _maxabs(H[a] @ H[b] - H[b] @ H[a]))
        for a in range(n):
            for q in range(1, m):
                invari = max(
                    invari, _maxabs(_apply_slot(W, H[a], 0) - _apply_slot(W, H[a], q))
                )
        dmat = [[fd(lambda w, jj=jj: cache.at(w)[0][jj], z, i) for jj in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                integ = max(integ, _maxabs(dmat[i][j] - dmat[j][i]))
        for I in max_inds:
            for i in range(n):
                dv = fd(
                    lambda w, I=I: _apply_subset(cache.at(w)[0], I, cache.at(w)[1]), z, i
                )
                sect = max(sect, _maxabs(dv))
        for i in range(n):
            formflat = max(formflat, _maxabs(fd(lambda w: cache.at(w)[2], z, i)))
    report = AxiomReport(
        commutativity=comm,
        integrability=integ,
        higgs_invariance=invari,
        section_flatness=sect,
        form_flatness=formflat,
        samples=count,
        h=h,
    )
    if hard_threshold is not None and report.max_violation > hard_threshold:
        err = StructureError(
            f"axiom violation {report.max_violation:.3e} exceeds hard threshold {hard_threshold:.3e}"
        )
        err.report = report
        raise err
    return report


def _factorial_multi(mult) -> int:
    out = 1
    for v in mult:
        out *= math.factorial(v)
    return out


@dataclass
class HomogeneousPolynomial:
    """Polynomial sum of c_T z^T with all |T| equal to the degree."""

    n: int
    degree: int
    coefficients: dict[tuple[int, ...], complex]

    def coefficient(self, mult) -> complex:
        return self.coefficients.get(tuple(mult), 0.0 + 0.0j)

    def partial_derivative_value(self, alpha, z) -> complex:
        """Exact evaluation of the alpha-th mixed derivative at z."""
        alpha = tuple(alpha)
        z = np.asarray(z, dtype=complex)
        total = 0.0 + 0.0j
        for T, c in self.coefficients.items():
            if any(t < a for t, a in zip(T, alpha)):
                continue
            term = c
            for t, a, zi in zip(T, alpha, z):
                term *= math.factorial(t) // math.factorial(t - a)
                term *= zi ** (t - a)
            total += term
        return total

    def evaluate(self, z) -> complex:
        return self.partial_derivative_value((0,) * self.n, z)


def _default_resample_points(F: FlatFrameStructure):
    x = F.basepoint
    s = 0.05 * (1.0 + F.scale())
    first = x.copy()
    first[0] += s
    second = x + s * 0.6 * np.array(
        [1.0 if i % 2 == 0 else -1.0 for i in range(F.n)], dtype=complex
    )
    return [first, second]


def first_kind_polynomial(
    F: FlatFrameStructure,
    resample=None,
    flat_tol: float = 1e-7,
) -> HomogeneousPolynomial:
    """Homogeneous degree-mk polynomial with coefficients S(C_T unit, ...)/T!.

    Coefficients live exactly on the strong mk-systems (sums of m bases); all
    other monomials stay at zero, the gauge in which nothing unconstrained is
    invented.  Values are taken at the basepoint and re-sampled nearby to
    confirm they are constants; disagreement raises FlatnessError.
    """
    cache = _EvalCache(F)
    ctx = F.context()
    mk = ctx.m * ctx.k
    strong: set[tuple[int, ...]] = set()
    for combo in combinations_with_replacement(ctx.base_systems, ctx.m):
        total = ctx.zero()
        for b in combo:
            total = total + b
        strong.add(total.mult)
    points = _default_resample_points(F) if resample is None else list(resample)
    coeffs: dict[tuple[int, ...], complex] = {}
    for T in sorted(strong):
        fact = _factorial_multi(T)
        base_val = pairing_with_unit(cache, T, F.basepoint) / fact
        for z in points:
            other = pairing_with_unit(cache, T, z) / fact
            if abs(other - base_val) > flat_tol * (1.0 + abs(base_val)):
                raise FlatnessError(
                    f"coefficient of {T} varies with z: {base_val} vs {other}"
                )
        coeffs[T] = base_val
    return HomogeneousPolynomial(n=F.n, degree=mk, coefficients=coeffs)


def check_first_kind(F: FlatFrameStructure, Q: HomogeneousPolynomial) -> float:
    """Worst |d_{I_1}...d_{I_m} Q - S(C_{I_1} unit, ..., C_{I_m} unit)|.

    The left side is evaluated by exact differentiation of the polynomial,
    the right by direct evaluation at the basepoint.
    """
    cache = _EvalCache(F)
    H, u, W = cache.at(F.basepoint)
    worst = 0.0
    for tup in combinations_with_replacement(F.maximal_independent_sets(), F.m):
        alpha = [0] * F.n
        for I in tup:
            for i in I:
                alpha[i - 1] += 1
        lhs = Q.partial_derivative_value(alpha, F.basepoint)
        vectors = [_apply_subset(H, I, u) for I in tup]
        rhs = _contract(W, vectors)
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class CoefficientProvenance:
    """How one Taylor coefficient was obtained."""

    kind: str  # "gauge-zero" | "free-zero" | "averaged"
    candidates: tuple[tuple[tuple[int, ...], tuple[int, ...], complex], ...]
    spread: float
    value: complex


@dataclass
class TruncatedPotential:
    basepoint: np.ndarray
    n_max: int
    coefficients: dict[tuple[int, ...], complex]
    provenance: dict[tuple[int, ...], CoefficientProvenance] = field(repr=False)

    @property
    def spread_max(self) -> float:
        spreads = [p.spread for p in self.provenance.values()]
        return max(spreads) if spreads else 0.0

    def coefficient(self, mult) -> complex:
        return self.coefficients.get(tuple(mult), 0.0 + 0.0j)

    def derivative_at_basepoint(self, alpha) -> complex:
        alpha = tuple(alpha)
        if sum(alpha) > self.n_max:
            raise PreconditionError("derivative order exceeds the truncation order")
        return self.coefficient(alpha) * _factorial_multi(alpha)

    def evaluate(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        shifted = z - np.asarray(self.basepoint, dtype=complex)
        total = 0.0 + 0.0j
        for T, c in self.coefficients.items():
            term = c
            for t, w in zip(T, shifted):
                term *= w**t
            total += term
        return total


def second_kind_truncation(
    F: FlatFrameStructure,
    n_max: int,
    h: float | None = None,
    use_richardson: bool = True,
    spread_tol: float = 1e-6,
    max_total: int = 24,
) -> TruncatedPotential:
    """Taylor table of the second-kind potential to total degree n_max.

    Coefficients with |T| <= mk, and those whose T has no good decomposition,
    are unconstrained and set to zero.  Every other coefficient is computed
    once per good decomposition by mixed central differences and averaged;
    a spread above ``spread_tol`` (relative to the coefficient size) raises
    WellDefinednessError.
    """
    cache = _EvalCache(F)
    ctx = F.context()
    mk = ctx.m * ctx.k
    if n_max < mk + 1:
        raise PreconditionError(f"n_max must be at least m*k + 1 = {mk + 1}")
    x = F.basepoint
    scale = F.scale()
    coefficients: dict[tuple[int, ...], complex] = {}
    provenance: dict[tuple[int, ...], CoefficientProvenance] = {}
    for t in range(0, n_max + 1):
        for T in _bounded_compositions(t, (t,) * F.n):
            if t <= mk:
                coefficients[T] = 0.0 + 0.0j
                provenance[T] = CoefficientProvenance("gauge-zero", (), 0.0, 0.0 + 0.0j)
                continue
            goods = all_good_decompositions(ctx.system(T), max_total)
            if not goods:
                coefficients[T] = 0.0 + 0.0j
                provenance[T] = CoefficientProvenance("free-zero", (), 0.0, 0.0 + 0.0j)
                continue
            fact = _factorial_multi(T)
            candidates = []
            for good in goods:
                alpha = good.T1.mult
                order = sum(alpha)
                t2 = good.T2.mult
                if order == 0:
                    raw = pairing_with_unit(cache, t2, x)
                else:
                    step = default_step(scale, order) if h is None else h
                    raw = multi_partial(
                        lambda z, t2=t2: pairing_with_unit(cache, t2, z),
                        x,
                        alpha,
                        step,
                        use_richardson=use_richardson,
                    )
                candidates.append((alpha, t2, raw / fact))
            values = [c[2] for c in candidates]
            spread = max(
                (abs(a - b) for a in values for b in values), default=0.0
            )
            top = max(abs(v) for v in values)
            if spread > spread_tol * max(1.0, top):
                raise WellDefinednessError(
                    f"coefficient candidates for {T} disagree by {spread:.3e}"
                )
            coefficients[T] = sum(values) / len(values)
            provenance[T] = CoefficientProvenance(
                "averaged", tuple(candidates), spread, coefficients[T]
            )
    return TruncatedPotential(
        basepoint=np.asarray(x, dtype=complex),
        n_max=n_max,
        coefficients=coefficients,
        provenance=provenance,
    )


def check_second_kind(F: FlatFrameStructure, L: TruncatedPotential) -> float:
    """Worst defect of d_i d_{I_1} ... d_{I_m} L against the direct evaluation
    S(C_i C_{I_1} unit, C_{I_2} unit, ...) at the basepoint."""
    cache = _EvalCache(F)
    H, u, W = cache.at(F.basepoint)
    worst = 0.0
    for i in F.matroid.ground.labels:
        for tup in combinations_with_replacement(F.maximal_independent_sets(), F.m):
            alpha = [0] * F.n
            alpha[i - 1] += 1
            for I in tup:
                for j in I:
                    alpha[j - 1] += 1
            lhs = L.derivative_at_basepoint(alpha)
            vectors = [_apply_subset(H, I, u) for I in tup]
            vectors[0] = H[i - 1] @ vectors[0]
            rhs = _contract(W, vectors)
            worst = max(worst, abs(lhs - rhs))
    return worst


def remainder_swap_residual(
    F: FlatFrameStructure,
    T2: System,
    a: int,
    b: int,
    h: float | None = None,
    use_richardson: bool = True,
) -> float:
    """|d_b S(C_{T2} unit, ...) - d_a S(C_{S2} unit, ...)| at the basepoint,
    where S2 swaps one unit of a for one of b in T2.

    Requires T2 to be strong with remainder [a]; then S2 = T2 + [b] - [a] is
    strong with remainder [b] and both derivatives must agree: this is the
    atomic exchange that makes the second-kind coefficients well defined.
    """
    ctx = F.context()
    rest = T2.try_sub(ctx.unit(a))
    if rest is None:
        raise PreconditionError(f"label {a} does not occur in T2")
    if T2.total != ctx.m * ctx.k + 1:
        raise PreconditionError("T2 must be a strong (mk+1)-system")
    if find_strong_decomposition(rest, 0) is None:
        raise PreconditionError(f"T2 minus [{a}] is not a strong mk-system")
    S2 = rest + ctx.unit(b)
    cache = _EvalCache(F)
    x = F.basepoint
    step = default_step(F.scale(), 1) if h is None else h
    alpha_b = tuple(1 if j == b else 0 for j in ctx.matroid.ground.labels)
    alpha_a = tuple(1 if j == a else 0 for j in ctx.matroid.ground.labels)
    d1 = multi_partial(
        lambda z: pairing_with_unit(cache, T2.mult, z), x, alpha_b, step, use_richardson
    )
    d2 = multi_partial(
        lambda z: pairing_with_unit(cache, S2.mult, z), x, alpha_a, step, use_richardson
    )
    return abs(d1 - d2)
