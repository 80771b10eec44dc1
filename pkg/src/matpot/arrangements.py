"""Flat-frame structures from weighted families of hyperplane arrangements.

The family has hyperplanes f_i(z, t) = sum_j b_i^j t_j + z_i in the fiber
variables t, with exact rational coefficient matrix B of full column rank k
and nonzero weights a_i.  The master function

    Phi(z, t) = sum_i a_i log f_i(z, t)

has, for z off the discriminant, finitely many nondegenerate fiberwise
critical points t^1, ..., t^mu; functions on those points form the fiber
algebra.  In that diagonal picture the Higgs matrices are diag(a_i / f_i),
the unit is the all-ones vector, and the residue pairing is

    S(h_1, ..., h_m) = sum_s h_1(t^s) ... h_m(t^s) / det Hess_t Phi(t^s).

To present this as a FlatFrameStructure the working frame is changed to mu
of the sections C_I (unit) for maximal independent index sets I: those
sections satisfy only constant-coefficient relations, so the frame they span
is flat, the form becomes z-constant, and the flatness of the remaining
sections is a genuine testable statement.  The raw diagonal data stays
available on the backend for exactness checks.

Only k = 1 is a fully supported path (critical points come from the roots of
an explicit degree n-1 polynomial plus Newton refinement).  For k >= 2 the
solver falls back to multivariate Newton from a deterministic random cloud of
seeds; that path is experimental and makes no completeness claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ContinuationError,
    DiscriminantError,
    GroundSetError,
    PreconditionError,
    RankError,
    StructureError,
)
from .frobenius import FlatFrameStructure
from .matroids import LinearMatroid


def vector_matroid(matrix) -> LinearMatroid:
    """Row matroid of an exact rational n x k matrix of full column rank."""
    M = LinearMatroid(matrix)
    if M.full_rank != M.width:
        raise RankError(
            f"matrix has rank {M.full_rank}, expected full column rank {M.width}"
        )
    return M


def _exact_weight(value):
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return None


class ArrangementData:
    """Coefficients, weights, and basepoint of a weighted arrangement family."""

    def __init__(self, matrix, weights, basepoint):
        self.matroid = vector_matroid(matrix)
        self.matrix = self.matroid.rows
        self.n = len(self.matrix)
        self.k = self.matroid.width
        if self.k >= self.n:
            raise PreconditionError(f"need k < n, got k={self.k}, n={self.n}")
        weights = tuple(weights)
        if len(weights) != self.n:
            raise GroundSetError(f"need {self.n} weights, got {len(weights)}")
        if any(complex(w) == 0 for w in weights):
            raise GroundSetError("weights must be nonzero")
        self.weights = weights
        self.weights_exact = tuple(_exact_weight(w) for w in weights)
        self.basepoint = np.asarray(basepoint, dtype=complex)
        if self.basepoint.shape != (self.n,):
            raise GroundSetError(f"basepoint must have {self.n} coordinates")
        self.B = np.array([[complex(v) for v in row] for row in self.matrix])
        self.a = np.array([complex(w) for w in weights])

    def hyperplane_values(self, z, points):
        """f_i(z, t^s) for all i and critical points; shape (mu, n)."""
        return points @ self.B.T + np.asarray(z, dtype=complex)[None, :]


@dataclass
class CriticalPointFrame:
    """Critical points of the master function in one fiber, with Hessian data."""

    z: np.ndarray
    points: np.ndarray  # (mu, k)
    hessians: np.ndarray  # (mu, k, k)
    det_hess: np.ndarray  # (mu,)
    residuals: np.ndarray  # (mu,)

    @property
    def mu(self) -> int:
        return len(self.points)


def _hyperplane_values_at(data: ArrangementData, z, t):
    return data.B @ t + z


def _gradient(data: ArrangementData, z, t):
    f = _hyperplane_values_at(data, z, t)
    if np.min(np.abs(f)) < 1e-300:
        raise DiscriminantError("critical point collided with a hyperplane")
    return data.B.T @ (data.a / f), f


def _hessian(data: ArrangementData, f):
    w = data.a / f**2
    return -(data.B.T * w[None, :]) @ data.B


def _newton_refine(data: ArrangementData, z, t, max_iter: int = 50):
    t = np.array(t, dtype=complex)
    for _ in range(max_iter):
        g, f = _gradient(data, z, t)
        H = _hessian(data, f)
        try:
            delta = np.linalg.solve(H, g)
        except np.linalg.LinAlgError as exc:
            raise DiscriminantError("degenerate Hessian during Newton refinement") from exc
        t = t - delta
        if np.max(np.abs(delta)) <= 1e-15 * (1.0 + np.max(np.abs(t))):
            break
    g, _ = _gradient(data, z, t)
    return t, float(np.max(np.abs(g)))


def _poly_from_factors(pairs):
    """Coefficients (descending) of the product of linear factors b*t + c."""
    coeffs = np.array([1.0 + 0.0j])
    for b, c in pairs:
        coeffs = np.convolve(coeffs, np.array([b, c], dtype=complex))
    return coeffs


def _vertex_seed_cloud(data: ArrangementData, z, jitter: float = 1e-3):
    """Seeds for k >= 2 Newton: hyperplane intersection vertices, their
    pairwise midpoints and triple centroids, lightly jittered.

    Critical points of a master function with generic weights sit inside the
    cells cut out by the hyperplanes, so cell-anchored seeds reach them while
    a plain random cloud mostly escapes to infinity.
    """
    import itertools

    z = np.asarray(z, dtype=complex)
    vertices = []
    for rows in itertools.combinations(range(data.n), data.k):
        A = data.B[list(rows), :]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        v = np.linalg.solve(A, -z[list(rows)])
        vertices.append(v)
    seeds = list(vertices)
    for u, v in itertools.combinations(vertices, 2):
        seeds.append((u + v) / 2.0)
    for u, v, w in itertools.combinations(vertices, 3):
        seeds.append((u + v + w) / 3.0)
    rng = np.random.default_rng(20240521)
    out = []
    for s in seeds:
        out.append(s)
        out.append(
            s
            + jitter
            * (rng.standard_normal(data.k) + 1j * rng.standard_normal(data.k))
        )
    return out


def _k1_candidate_roots(data: ArrangementData, z):
    z = np.asarray(z, dtype=complex)
    active = [i for i in range(data.n) if data.matrix[i][0] != 0]
    if len(active) < 2:
        raise PreconditionError("need at least two hyperplanes involving the fiber variable")
    active_weights = [data.weights_exact[i] for i in active]
    if all(w is not None for w in active_weights):
        # top coefficient is prod(b_j) * sum(a_i) over active rows, so only
        # a vanishing weight sum can degenerate the fiber count
        if sum(active_weights) == 0:
            raise DiscriminantError("weights are balanced: top coefficient vanishes")
    poly = np.zeros(len(active), dtype=complex)
    for i in active:
        factors = [(data.B[j, 0], z[j]) for j in active if j != i]
        contrib = data.a[i] * data.B[i, 0] * _poly_from_factors(factors)
        poly += contrib
    expected = len(active) - 1
    top = np.max(np.abs(poly))
    if top == 0 or abs(poly[0]) < 1e-12 * top:
        raise DiscriminantError("fiber polynomial degenerates (leading coefficient ~ 0)")
    return np.roots(poly), expected


def critical_points(
    data: ArrangementData,
    z,
    seeds=None,
    hyper_margin: float | None = None,
    dist_margin: float | None = None,
    hess_margin: float = 1e-12,
) -> CriticalPointFrame:
    """All fiberwise critical points over z, Newton-refined and validated.

    Raises DiscriminantError when points coincide, land on a hyperplane, or
    have (nearly) singular Hessians.  For k >= 2 pass explicit ``seeds`` or
    rely on the deterministic random cloud (experimental).
    """
    z = np.asarray(z, dtype=complex)
    scale = 1.0 + float(np.max(np.abs(z)))
    if hyper_margin is None:
        hyper_margin = 1e-8 * scale
    if dist_margin is None:
        dist_margin = 1e-8 * scale
    if data.k == 1:
        raw, expected = _k1_candidate_roots(data, z)
        candidates = [np.array([r]) for r in raw]
    else:
        expected = None
        if seeds is None:
            seeds = _vertex_seed_cloud(data, z)
        candidates = [np.asarray(s, dtype=complex) for s in seeds]
    strict = data.k == 1
    refined = []
    for t0 in candidates:
        try:
            t, res = _newton_refine(data, z, t0)
        except DiscriminantError:
            if strict:
                raise
            continue
        if not strict:
            # spurious fixed points at infinity have tiny gradients too
            if res > 1e-9 * scale or np.max(np.abs(t)) > 1e6 * scale:
                continue
        refined.append((t, res))
    points: list = []
    residuals: list = []
    for t, res in refined:
        if any(np.max(np.abs(t - p)) < dist_margin for p in points):
            if strict:
                raise DiscriminantError("critical points collide")
            continue
        fvals = _hyperplane_values_at(data, z, t)
        if np.min(np.abs(fvals)) < hyper_margin:
            if strict:
                raise DiscriminantError("a critical point lies on (or too near) a hyperplane")
            continue
        det = np.linalg.det(_hessian(data, fvals))
        if abs(det) < hess_margin:
            if strict:
                raise DiscriminantError("degenerate critical point (vanishing Hessian)")
            continue
        points.append(t)
        residuals.append(res)
    if strict and len(points) != expected:
        raise DiscriminantError(
            f"found {len(points)} critical points, expected {expected}"
        )
    if not points:
        raise DiscriminantError("no nondegenerate critical points found")
    order = np.lexsort(
        (np.asarray([p[-1].imag for p in points]), np.asarray([p[-1].real for p in points]))
    )
    points = [points[i] for i in order]
    residuals = [residuals[i] for i in order]
    pts = np.array(points)
    fvals = data.hyperplane_values(z, pts)
    hessians = np.array([_hessian(data, fv) for fv in fvals])
    dets = np.array([np.linalg.det(Hs) for Hs in hessians])
    return CriticalPointFrame(
        z=z,
        points=pts,
        hessians=hessians,
        det_hess=dets,
        residuals=np.array(residuals),
    )


def discriminant_probe(data: ArrangementData, z) -> bool:
    """True iff the fiber over z has the full count of clean critical points."""
    try:
        critical_points(data, z)
    except (DiscriminantError, ContinuationError, PreconditionError):
        return False
    return True


def _match_points(reference: np.ndarray, fresh: np.ndarray):
    """Assign each reference point its nearest fresh point, injectively.

    Returns the permuted fresh array, or None when the nearest-point
    assignment is ambiguous (collision or non-injective match).
    """
    mu = len(reference)
    if len(fresh) != mu:
        return None
    dist = np.linalg.norm(reference[:, None, :] - fresh[None, :, :], axis=2)
    choice = np.argmin(dist, axis=1)
    if len(set(choice.tolist())) != mu:
        return None
    # ambiguous if some reference point is nearly equidistant to two targets
    for s in range(mu):
        row = np.sort(dist[s])
        if len(row) > 1 and row[0] > 0.49 * row[1]:
            return None
    return fresh[choice]


def continue_fiber(
    data: ArrangementData,
    frame: CriticalPointFrame,
    z_target,
    max_depth: int = 40,
) -> CriticalPointFrame:
    """Track the critical points of ``frame`` to the fiber over z_target.

    Nearest-point matching against a freshly computed fiber, with recursive
    path bisection (predictor-corrector with step halving) when the matching
    is ambiguous; raises ContinuationError when the budget runs out.
    """
    z_target = np.asarray(z_target, dtype=complex)
    if np.array_equal(frame.z, z_target):
        return frame

    def step(current: CriticalPointFrame, target, depth: int) -> CriticalPointFrame:
        fresh = critical_points(data, target)
        matched = _match_points(current.points, fresh.points)
        if matched is None:
            if depth >= max_depth:
                raise ContinuationError("point tracking lost between fibers")
            mid = (current.z + target) / 2.0
            halfway = step(current, mid, depth + 1)
            return step(halfway, target, depth + 1)
        perm = []
        for p in matched:
            idx = int(np.argmin(np.linalg.norm(fresh.points - p[None, :], axis=1)))
            perm.append(idx)
        return CriticalPointFrame(
            z=np.asarray(target, dtype=complex),
            points=fresh.points[perm],
            hessians=fresh.hessians[perm],
            det_hess=fresh.det_hess[perm],
            residuals=fresh.residuals[perm],
        )

    return step(frame, z_target, 0)


class ArrangementBackend:
    """Caches fibers and per-z frame data for one arrangement structure."""

    def __init__(self, data: ArrangementData, m: int, flat_basis):
        self.data = data
        self.m = m
        self.flat_basis = tuple(tuple(sorted(I)) for I in flat_basis)
        self.base_frame = critical_points(data, data.basepoint)
        self._fibers: dict = {tuple(data.basepoint.tolist()): self.base_frame}
        self._derived: dict = {}

    def fiber(self, z) -> CriticalPointFrame:
        z = np.asarray(z, dtype=complex)
        key = tuple(z.tolist())
        hit = self._fibers.get(key)
        if hit is None:
            hit = self._fibers[key] = continue_fiber(self.data, self.base_frame, z)
        return hit

    def p_values(self, z) -> np.ndarray:
        """Matrix P[i, s] = a_i / f_i(t^s, z) of Higgs eigenvalues."""
        frame = self.fiber(z)
        fvals = self.data.hyperplane_values(z, frame.points)  # (mu, n)
        return (self.data.a[None, :] / fvals).T

    def residue_weights(self, z) -> np.ndarray:
        return 1.0 / self.fiber(z).det_hess

    def _frame_data(self, z):
        key = tuple(np.asarray(z, dtype=complex).tolist())
        hit = self._derived.get(key)
        if hit is None:
            P = self.p_values(z)
            mu = P.shape[1]
            U = np.ones((mu, len(self.flat_basis)), dtype=complex)
            for c, I in enumerate(self.flat_basis):
                for i in I:
                    U[:, c] *= P[i - 1]
            w = self.residue_weights(z)
            hit = self._derived[key] = (P, U, w)
        return hit

    def higgs(self, label, z):
        P, U, _ = self._frame_data(z)
        return np.linalg.solve(U, P[label - 1][:, None] * U)

    def unit(self, z):
        _, U, _ = self._frame_data(z)
        return np.linalg.solve(U, np.ones(U.shape[0], dtype=complex))

    def form(self, z):
        _, U, w = self._frame_data(z)
        letters = "abcdefghij"[: self.m]
        subs = ",".join(f"s{c}" for c in letters) + ",s->" + letters
        return np.einsum(subs, *([U] * self.m), w)

    def diagonal_form(self, z, vectors):
        """Residue pairing of value vectors in the critical-point frame."""
        w = self.residue_weights(z)
        out = w.copy()
        for v in vectors:
            out = out * np.asarray(v, dtype=complex)
        return complex(np.sum(out))

    def x_field_residual(self, z) -> float:
        """Worst |sum_i b_i^j p_i| over the fiber; zero in exact arithmetic."""
        P = self.p_values(z)
        comb = self.data.B.T @ P  # (k, mu)
        return float(np.max(np.abs(comb)))

    def section_matrix(self, z) -> np.ndarray:
        """Columns: diagonal-frame values of C_I (unit) for every maximal
        independent I, in lexicographic order of I."""
        P = self.p_values(z)
        sets = [tuple(sorted(B)) for B in self.data.matroid.bases()]
        mu = P.shape[1]
        V = np.ones((mu, len(sets)), dtype=complex)
        for c, I in enumerate(sets):
            for i in I:
                V[:, c] *= P[i - 1]
        return V

    def generation_rank(self, z) -> int:
        V = self.section_matrix(z)
        return int(np.linalg.matrix_rank(V, tol=1e-9 * max(1.0, float(np.max(np.abs(V))))))

    def pairing_condition(self, z) -> float:
        """Condition number of the flat-frame pairing matrix (m = 2 only)."""
        if self.m != 2:
            raise PreconditionError("pairing condition is defined for m = 2")
        return float(np.linalg.cond(self.form(z)))


def _choose_flat_basis(data: ArrangementData, frame: CriticalPointFrame):
    """Greedily pick mu maximal independent sets whose sections span the fiber."""
    fvals = data.hyperplane_values(data.basepoint, frame.points)
    P = (data.a[None, :] / fvals).T
    mu = frame.mu
    sets = [tuple(sorted(B)) for B in data.matroid.bases()]
    chosen = []
    basis_cols = []
    for I in sets:
        col = np.ones(mu, dtype=complex)
        for i in I:
            col *= P[i - 1]
        trial = basis_cols + [col]
        M = np.array(trial).T
        if np.linalg.matrix_rank(M, tol=1e-9 * max(1.0, float(np.max(np.abs(M))))) == len(trial):
            chosen.append(I)
            basis_cols.append(col)
        if len(chosen) == mu:
            break
    if len(chosen) < mu:
        raise StructureError(
            "the flat sections do not span the fiber (generation condition fails); "
            "no flat frame can be assembled"
        )
    return chosen


def structure_from_arrangement(
    data: ArrangementData, m: int, allow_k_ge_2: bool = False
) -> FlatFrameStructure:
    """FlatFrameStructure of order (n, k, m) backed by the arrangement family.

    The working frame consists of mu flat sections C_I (unit) chosen at the
    basepoint; Higgs matrices, unit, and form are conjugated into it, and the
    critical points entering every evaluation are tracked by continuation so
    frames are consistent across z.
    """
    if data.k >= 2 and not allow_k_ge_2:
        raise PreconditionError(
            "k >= 2 critical-point solving is experimental; pass allow_k_ge_2=True"
        )
    if m < 1:
        raise PreconditionError("need m >= 1")
    base_frame = critical_points(data, data.basepoint)
    flat_basis = _choose_flat_basis(data, base_frame)
    backend = ArrangementBackend(data, m, flat_basis)
    return FlatFrameStructure(
        matroid=data.matroid,
        m=m,
        basepoint=data.basepoint,
        mu=base_frame.mu,
        higgs=backend.higgs,
        unit=backend.unit,
        form=backend.form,
        frame_flat=True,
        backend=backend,
    )
