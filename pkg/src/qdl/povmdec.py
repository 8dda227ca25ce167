"""Constructive decomposition of finite-outcome POVMs into extremal rank-1
measurements.

In the generalized Bloch picture a rank-1 POVM is a weighted set of points
on a sphere whose weighted barycentre sits at the origin; feasible weight
redistributions form a polytope whose vertices are exactly the extremal
measurements assembled from the original elements.  A phase-1 simplex finds
one vertex per step, the largest extractable probability is peeled off, and
at least one outcome dies each round, so an N-outcome rank-1 POVM on
dimension d splits into at most (N-1)d + 1 extremals.  Higher-rank inputs
are first split along their eigenbases, with a relabelling map carrying the
outcomes back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg

SUM_TOL = 1e-9
PSD_TOL = 1e-9
_ZERO = 1e-10  # simplex zero threshold on reduced costs and weights


class InfeasiblePovmError(ValueError):
    """The weighted Bloch points cannot balance: the offending input is not a
    POVM.  Carries a separating vector with negative product against every
    point."""

    def __init__(self, message: str, certificate: np.ndarray):
        super().__init__(message)
        self.certificate = certificate


class UnsupportedCriterionError(ValueError):
    """Ordering criterion without a validity guarantee in this dimension."""


@dataclass(frozen=True)
class Povm:
    """Labelled positive elements resolving the identity on dimension d."""

    dim: int
    elements: tuple

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")
        elems = []
        for label, op in self.elements:
            elems.append((str(label), linalg.require_hermitian(op)))
        object.__setattr__(self, "elements", tuple(elems))

    def total(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for _, op in self.elements:
            out += op
        return out

    def labels(self) -> tuple:
        return tuple(label for label, _ in self.elements)


@dataclass(frozen=True)
class BlochPoint:
    """Trace weight and generalized Bloch vector of a normalized element."""

    weight: float
    vector: np.ndarray

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))


@dataclass(frozen=True)
class DecompositionResult:
    """Probability-weighted extremal POVMs plus the outcome relabelling."""

    terms: tuple
    relabel: dict

    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.terms])

    def reconstruct(self, dim: int, labels) -> dict:
        """Aggregate p_k * elements through the relabel map, per original label."""
        out = {lab: np.zeros((dim, dim), dtype=complex) for lab in labels}
        for p, extremal in self.terms:
            for lab, op in extremal.elements:
                out[self.relabel[lab]] += p * op
        return out


@dataclass
class PovmDiagnostics:
    weight_residual: float
    barycentre_residual: float
    identity_residual: float
    min_eigenvalues: dict
    is_valid: bool = field(init=False)

    def __post_init__(self):
        self.is_valid = (
            self.identity_residual <= SUM_TOL
            and min(self.min_eigenvalues.values(), default=0.0) >= -PSD_TOL
        )


def gellmann_basis(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann generators of SU(d): d^2 - 1 traceless Hermitian
    matrices with tr(g_i g_j) = 2 delta_ij.  For d = 2 these are the Pauli
    matrices."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            out.append(sym)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            out.append(anti)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag * math.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return out


@lru_cache(maxsize=16)
def _generator_stack(d: int) -> np.ndarray:
    return np.stack(gellmann_basis(d))


def bloch_points(p: Povm) -> list[BlochPoint]:
    """Weights and Bloch vectors of the normalized POVM elements."""
    gens = _generator_stack(p.dim)
    pts = []
    for _, op in p.elements:
        a = float(np.trace(op).real)
        if a <= _ZERO:
            continue
        vec = np.einsum("gij,ji->g", gens, op / a).real
        pts.append(BlochPoint(weight=a, vector=vec))
    return pts


def element_from_bloch(point: BlochPoint, d: int) -> np.ndarray:
    """Reconstruct weight * (1/d + v.generators / 2) from a Bloch point."""
    basis = gellmann_basis(d)
    out = np.eye(d, dtype=complex) / d
    for v, g in zip(point.vector, basis):
        out += 0.5 * v * g
    return point.weight * out


def validate_povm(p: Povm) -> PovmDiagnostics:
    """Diagnostics only, never raises: identity and barycentre residuals plus
    the smallest eigenvalue of every element."""
    pts = bloch_points(p)
    weight_residual = abs(sum(pt.weight for pt in pts) - p.dim)
    bary = sum((pt.weight * pt.vector for pt in pts), np.zeros(p.dim**2 - 1))
    identity_residual = float(np.abs(p.total() - np.eye(p.dim)).max())
    min_eigs = {
        label: float(np.linalg.eigvalsh(op)[0]) for label, op in p.elements
    }
    return PovmDiagnostics(
        weight_residual=float(weight_residual),
        barycentre_residual=float(np.linalg.norm(bary)),
        identity_residual=identity_residual,
        min_eigenvalues=min_eigs,
    )


def require_valid(p: Povm):
    diag = validate_povm(p)
    if not diag.is_valid:
        raise ValueError(
            f"not a POVM: identity residual {diag.identity_residual:.2e}, "
            f"min eigenvalue {min(diag.min_eigenvalues.values()):.2e}"
        )


def rank1_expand(p: Povm) -> tuple[Povm, dict]:
    """Split every element along its eigenbasis into rank-1 outcomes.

    Eigenvalues below 1e-10 of the element trace are dropped as numerical
    zeros.  Returns the rank-1 POVM and the map from new labels back to the
    source outcomes; aggregating through the map recovers the input.
    """
    new_elements = []
    relabel = {}
    for label, op in p.elements:
        w, v = linalg.herm_eig(op)
        tr = max(float(np.sum(w)), _ZERO)
        keep = [i for i in range(len(w)) if w[i] > 1e-10 * tr]
        if len(keep) == 1 and abs(w[keep[0]] - np.sum(w)) < 1e-12 * tr:
            new_elements.append((label, op))
            relabel[label] = label
            continue
        for pos, i in enumerate(keep):
            vec = v[:, i]
            new_label = f"{label}#{pos}" if len(keep) > 1 else label
            new_elements.append((new_label, w[i] * np.outer(vec, vec.conj())))
            relabel[new_label] = label
    return Povm(dim=p.dim, elements=tuple(new_elements)), relabel


def _phase1_simplex(a: np.ndarray, b: np.ndarray):
    """Feasibility phase of the simplex method for A x = b, x >= 0.

    Revised form; basis systems go through LAPACK's partially pivoted
    solves.  Pivoting is steepest-cost by default and switches to Bland's
    anti-cycling rule whenever the objective stalls on degenerate steps.
    Returns (x, None) when feasible and (None, dual certificate y with
    y.A <= 0, y.b > 0) otherwise.
    """
    m, n = a.shape
    flip = np.where(b < 0, -1.0, 1.0)
    a = a * flip[:, None]
    b = b * flip
    ext = np.hstack([a, np.eye(m)])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    in_basis = np.zeros(n + m, dtype=bool)
    in_basis[basis] = True
    bland = False
    last_obj = math.inf
    stall = 0
    for _ in range(500 * (n + m)):
        bmat = ext[:, basis]
        xb = np.maximum(np.linalg.solve(bmat, b), 0.0)
        y = np.linalg.solve(bmat.T, cost[basis])
        reduced = cost - y @ ext
        reduced[in_basis] = 0.0
        entering = -1
        if bland:
            below = np.nonzero(reduced < -_ZERO)[0]
            if below.size:
                entering = int(below[0])
        else:
            j = int(np.argmin(reduced))
            if reduced[j] < -_ZERO:
                entering = j
        if entering < 0:
            obj = float(cost[basis] @ xb)
            if obj > 1e-8:
                return None, y * flip
            x = np.zeros(n)
            for i, var in enumerate(basis):
                if var < n:
                    x[var] = xb[i]
            return x, None
        direction = np.linalg.solve(bmat, ext[:, entering])
        rows = np.nonzero(direction > _ZERO)[0]
        if rows.size == 0:
            raise RuntimeError("unbounded feasibility subproblem")
        ratios = xb[rows] / direction[rows]
        best = float(ratios.min())
        # among ratio ties the smallest variable index leaves (Bland)
        _, leave_row = min(
            (basis[i], i) for i, r in zip(rows, ratios) if r <= best + 1e-12
        )
        obj = float(cost[basis] @ xb)
        if obj >= last_obj - 1e-13:
            stall += 1
            if stall > m + 10:
                bland = True
        else:
            stall = 0
        last_obj = obj
        in_basis[basis[leave_row]] = False
        in_basis[entering] = True
        basis[leave_row] = entering
    raise RuntimeError("simplex iteration limit exceeded")


def find_extremal_vertex(points: list[BlochPoint]) -> np.ndarray:
    """One vertex of the feasible-weight polytope: coefficients x >= 0 with
    sum x_i = d and sum x_i v_i = 0, supported on at most d^2 points.

    When no such x exists the input was not a POVM; the raised error carries
    a vector whose product with every Bloch vector is negative.
    """
    if not points:
        raise ValueError("no points given")
    nvec = len(points[0].vector)
    d = math.isqrt(nvec + 1)
    if d * d != nvec + 1:
        raise ValueError("Bloch vectors must have length d^2 - 1")
    a = np.vstack([
        np.stack([pt.vector for pt in points], axis=1),
        np.ones((1, len(points))),
    ])
    b = np.concatenate([np.zeros(nvec), [float(d)]])
    x, certificate = _phase1_simplex(a, b)
    if x is None:
        nu = certificate[:-1]
        norm = np.linalg.norm(nu)
        nu = nu / norm if norm > 0 else nu
        raise InfeasiblePovmError(
            "weighted Bloch points admit no balancing: not a POVM", nu
        )
    return x


def is_extremal(p: Povm) -> tuple[bool, np.ndarray | None]:
    """Extremality of a rank-1 POVM: linearly independent elements and at
    most d^2 of them.

    A failing POVM returns a null-space witness: coefficients y (one per
    element, relative to the normalized elements) with sum y_i E_i = 0, along
    which the measurement splits into two distinct POVMs.
    """
    mats = []
    for label, op in p.elements:
        w = np.linalg.eigvalsh(op)
        tr = float(np.sum(w))
        if tr > _ZERO and w[-1] < tr * (1.0 - 1e-8):
            raise ValueError(
                f"element {label!r} has rank > 1; expand with rank1_expand first"
            )
        mats.append((op / tr).ravel())
    stack = np.array(mats).T  # (d^2 complex, N)
    stack = np.vstack([stack.real, stack.imag])
    _, s, vh = np.linalg.svd(stack)
    rank = int(np.sum(s > 1e-10 * (s[0] if len(s) else 1.0)))
    if rank == len(p.elements) and len(p.elements) <= p.dim**2:
        return True, None
    witness = vh[-1]
    return False, witness


def _extraction_loop(rank1: Povm, choose_vertex):
    """Shared peeling loop over a rank-1 POVM.

    The normalized elements and their Bloch vectors never change; only the
    weight vector evolves, renormalized to its exact total each step so
    round-off cannot compound.  A step whose extraction probability is
    within 1e-8 of one (or whose vertex uses every live outcome) is final:
    the sliver that would remain carries reconstruction weight
    remaining * (1 - prob), far below round-off, and dividing by 1 - prob
    would only amplify noise.
    """
    d = rank1.dim
    labels = [label for label, _ in rank1.elements]
    traces = [float(np.trace(op).real) for _, op in rank1.elements]
    normalized = [op / t for (_, op), t in zip(rank1.elements, traces)]
    gens = _generator_stack(d)
    vectors = np.stack([np.einsum("gij,ji->g", gens, e).real for e in normalized])
    weights = np.array(traces)
    live = np.arange(len(labels))
    terms = []
    remaining = 1.0
    for _ in range(len(labels) + 1):
        pts = [BlochPoint(weights[i], vectors[i]) for i in live]
        x = choose_vertex(pts)
        support = x > _ZERO
        prob = float((weights[live][support] / x[support]).min())
        final = prob >= 1.0 - 1e-8 or int(support.sum()) == live.size
        elements = tuple(
            (labels[i], xi * normalized[i])
            for i, xi in zip(live, x)
            if xi > _ZERO
        )
        terms.append(
            (remaining if final else remaining * prob, Povm(dim=d, elements=elements))
        )
        if final:
            return tuple(terms)
        raw = np.maximum(weights[live] - prob * x, 0.0)
        raw[raw <= _ZERO * (1.0 - prob)] = 0.0
        raw *= d / raw.sum()
        weights[live] = raw
        live = live[raw > 0.0]
        remaining *= 1.0 - prob
    raise RuntimeError("extraction failed to terminate")


def decompose(p: Povm) -> DecompositionResult:
    """Express a POVM as a probability mixture of extremal rank-1 POVMs.

    Repeatedly finds a vertex, extracts it with the largest admissible
    probability (eliminating at least one live outcome), and recurses on the
    remainder.  Supports a classical relabelling step for inputs of rank
    above 1.
    """
    require_valid(p)
    rank1, relabel = rank1_expand(p)
    terms = _extraction_loop(rank1, find_extremal_vertex)
    return DecompositionResult(terms=terms, relabel=relabel)


# ---------------------------------------------------------------------------
# ordered decompositions
# ---------------------------------------------------------------------------


def _vertex_quality(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def _neighboring_vertices(points: list[BlochPoint], x: np.ndarray):
    """Vertices one simplex pivot away from x, found by re-solving the
    feasibility system with each support element forced out."""
    support = set(np.nonzero(x > _ZERO)[0])
    out = []
    for drop in sorted(support):
        sub = [pt for i, pt in enumerate(points) if i != drop]
        if len(sub) < 2:
            continue
        try:
            xs = find_extremal_vertex(sub)
        except InfeasiblePovmError:
            continue
        full = np.zeros(len(points))
        j = 0
        for i in range(len(points)):
            if i != drop:
                full[i] = xs[j]
                j += 1
        out.append(full)
    return out


def _antipodal_vertices(points: list[BlochPoint]) -> list[np.ndarray]:
    """Two-outcome vertices: pairs of opposite unit Bloch vectors (d = 2)."""
    out = []
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if float(points[i].vector @ points[j].vector) < -1.0 + 1e-9:
                x = np.zeros(n)
                x[i] = x[j] = 1.0
                out.append(x)
    return out


def ordered_decompose(p: Povm, criterion: str = "fewest-outcomes") -> DecompositionResult:
    """Decomposition biased toward extremals with fewer outcomes.

    Valid for d = 2 only, where the sum-of-squares vertex quality provably
    ranks two-outcome above three- above four-outcome extremals; beyond
    dimension 2 no ordering criterion is guaranteed and the call is refused.
    Each extraction takes the best vertex reachable from the feasibility
    vertex by single pivots, plus every antipodal pair.
    """
    if criterion != "fewest-outcomes":
        raise UnsupportedCriterionError(f"unknown criterion {criterion!r}")
    if p.dim != 2:
        raise UnsupportedCriterionError(
            "the fewest-outcomes ordering is only guaranteed for dimension 2"
        )
    require_valid(p)
    rank1, relabel = rank1_expand(p)

    def choose(points):
        best = find_extremal_vertex(points)
        improved = True
        while improved:
            improved = False
            for cand in _neighboring_vertices(points, best):
                if _vertex_quality(cand) > _vertex_quality(best) + 1e-12:
                    best, improved = cand, True
        for cand in _antipodal_vertices(points):
            if _vertex_quality(cand) > _vertex_quality(best) + 1e-12:
                best = cand
        return best

    terms = _extraction_loop(rank1, choose)
    return DecompositionResult(terms=terms, relabel=relabel)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------


def _matrix_to_json(op: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in op]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def povm_to_json(p: Povm) -> dict:
    return {
        "dim": p.dim,
        "elements": [
            {"label": label, "matrix": _matrix_to_json(op)}
            for label, op in p.elements
        ],
    }


def povm_from_json(data) -> Povm:
    if isinstance(data, str):
        data = json.loads(data)
    elements = tuple(
        (e["label"], _matrix_from_json(e["matrix"])) for e in data["elements"]
    )
    return Povm(dim=int(data["dim"]), elements=elements)


def decomposition_to_json(result: DecompositionResult) -> dict:
    return {
        "terms": [
            {"probability": float(p), "extremal": povm_to_json(extremal)}
            for p, extremal in result.terms
        ],
        "relabel": dict(result.relabel),
    }
