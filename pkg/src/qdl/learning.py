"""Learning machines for qubit classification.

A training set of 2n labelled qubits is measured first and only classical
information is carried forward to a Stern-Gerlach measurement on the data
qubit.  The covariant training measurement is generated by a single seed
operator; with the right seed the machine attains the programmable-machine
error for every training-set size.  This module evaluates that error, the
estimate-and-discriminate and reversed-order alternatives, the mixed-state
conditional operators, and a small-scale positive-semidefinite optimization
of the seed for noisy training sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .angular import HalfInt, clebsch_gordan, multiplicity
from .programmable import pure_rates


class EydRates(NamedTuple):
    pe: float
    excess_risk: float


class RobustnessFactors(NamedTuple):
    scaling: float
    excess_risk: float


def known_pair_error(r: float = 1.0) -> float:
    """Average single-copy minimum error over pairs of known states of
    purity r; the baseline that excess risks are measured from."""
    return 0.5 - r / 3.0


def lm_error(n: int) -> float:
    """Classification error of the trained machine for n pure copies per label.

    Computed from the norms of the two symmetric-subspace projections of the
    seed state joined with the data qubit, then checked against the
    programmable-machine bound, with which it must agree identically.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = n + 1
    # projection amplitudes of the seed (+ data qubit) onto the symmetric
    # coupling of data and the opposite-label block, per total spin k - 1/2
    norm_sq = 0.0
    for k in range(1, n + 2):
        amp = math.sqrt(k / (2.0 * d)) * (math.sqrt(d + k) - math.sqrt(d - k))
        norm_sq += amp * amp
    pe = norm_sq / (d * (n + 2))
    bound = pure_rates(n, 1).pe
    if abs(pe - bound) > 1e-12:
        raise AssertionError(
            f"learning-machine error {pe!r} deviates from the programmable "
            f"bound {bound!r}; internal invariant violated"
        )
    return pe


def spin_weights(j, r: float) -> np.ndarray:
    """Normalized magnetic-number weights of a spin-j block of a purity-r
    tensor power, ordered m = -j..j."""
    j2 = HalfInt.coerce(j).twice
    if r == 0.0:
        return np.full(j2 + 1, 1.0 / (j2 + 1))
    m2 = np.arange(-j2, j2 + 1, 2)
    w = ((1.0 - r) / 2.0) ** ((j2 - m2) / 2) * ((1.0 + r) / 2.0) ** ((j2 + m2) / 2)
    return w / w.sum()


def spin_z_expectation(j, r: float) -> float:
    """Mean magnetic number of a spin-j block at purity r."""
    j2 = HalfInt.coerce(j).twice
    m = np.arange(-j2, j2 + 1, 2) / 2.0
    return float(np.dot(m, spin_weights(j, r)))


def block_probability(n: int, j, r: float) -> float:
    """Probability that an n-fold purity-r power projects onto spin j."""
    j2 = HalfInt.coerce(j).twice
    nu = multiplicity(n, j)
    if r == 0.0:
        return nu * (j2 + 1) * 0.5**n
    c_j = (((1 + r) / 2) ** (j2 + 1) - ((1 - r) / 2) ** (j2 + 1)) / r
    return nu * c_j * ((1 - r * r) / 4.0) ** ((n - j2) // 2)


def gamma_up(n: int, r: float, ja, jc) -> np.ndarray:
    """Conditional training-set operator after an up outcome on the data
    qubit, in the (ja, jc) sector.

    The operator is diagonal in the product magnetic basis; the returned
    array holds its diagonal values on the (m_a, m_c) grid.  At r = 1 and
    maximal spins it reduces to (Jz_a - Jz_c) / ((n+1)^2 (n+2)).
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("purity must lie in (0, 1]")
    ja2 = HalfInt.coerce(ja).twice
    jc2 = HalfInt.coerce(jc).twice
    if (n - ja2) % 2 or (n - jc2) % 2:
        raise ValueError("sector spins must match the parity of n")
    ma = np.arange(-ja2, ja2 + 1, 2) / 2.0
    mc = np.arange(-jc2, jc2 + 1, 2) / 2.0

    def side(j2, mvals):
        if j2 == 0:
            return np.zeros(1)
        j = j2 / 2.0
        factor = r * spin_z_expectation(HalfInt(j2), r) / j
        return factor * mvals / (j + 1.0)

    grid = side(ja2, ma)[:, None] - side(jc2, mc)[None, :]
    return grid / (2.0 * (ja2 + 1) * (jc2 + 1))


def gamma_up_blocks(n: int, r: float) -> dict:
    """All sector operators with their occupation probabilities, keyed by
    the doubled sector spins (2 j_a, 2 j_c)."""
    out = {}
    for ja2 in range(n % 2, n + 1, 2):
        pa = block_probability(n, HalfInt(ja2), r)
        for jc2 in range(n % 2, n + 1, 2):
            pc = block_probability(n, HalfInt(jc2), r)
            out[(ja2, jc2)] = (pa * pc, gamma_up(n, r, HalfInt(ja2), HalfInt(jc2)))
    return out


@dataclass(frozen=True)
class SeedOperator:
    """Seed of the covariant training measurement.

    ``blocks`` maps (2 j_a, 2 j_c, 2 m) to a PSD matrix on the magnetic
    subspace m of that sector, ordered by ascending m_a.  Resolving the
    identity requires sum_m <j m|Omega_m|j m> = 2j + 1 for every total spin
    j the sector supports.
    """

    n: int
    blocks: dict

    def resolution_residual(self) -> float:
        worst = 0.0
        sectors = {(ja2, jc2) for ja2, jc2, _ in self.blocks}
        for ja2, jc2 in sectors:
            for j2 in range(abs(ja2 - jc2), ja2 + jc2 + 1, 2):
                tot = 0.0
                for m2 in range(-j2, j2 + 1, 2):
                    om = self.blocks.get((ja2, jc2, m2))
                    if om is None:
                        continue
                    cvec = _coupled_vector(ja2, jc2, j2, m2)
                    tot += float(np.real(cvec.conj() @ om @ cvec))
                worst = max(worst, abs(tot - (j2 + 1)))
        return worst

    def min_eigenvalue(self) -> float:
        return min(
            float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0])
            for b in self.blocks.values()
        )


def _m_basis(ja2: int, jc2: int, m2: int) -> list:
    """(m_a, m_c) pairs with m_a + m_c = m, ordered by ascending m_a."""
    out = []
    for ma2 in range(-ja2, ja2 + 1, 2):
        mc2 = m2 - ma2
        if -jc2 <= mc2 <= jc2:
            out.append((ma2, mc2))
    return out


def _coupled_vector(ja2: int, jc2: int, j2: int, m2: int) -> np.ndarray:
    basis = _m_basis(ja2, jc2, m2)
    return np.array(
        [
            clebsch_gordan(
                HalfInt(ja2), HalfInt(ma2), HalfInt(jc2), HalfInt(mc2), HalfInt(j2), HalfInt(m2)
            )
            for ma2, mc2 in basis
        ]
    )


class LmOptimum(NamedTuple):
    delta_lm: float
    seed: SeedOperator


def _optimize_sector(gamma_diag_by_m, cons_vectors, dims, rng, restarts):
    """Maximize sum_m tr(diag(g_m) Omega_m) over PSD Omega_m subject to the
    per-spin linear trace constraints.

    The factorization Omega_m = L_m L_m^T keeps iterates PSD by
    construction, at the cost of a nonconvex landscape that the random
    restarts sweep.  Each restart runs a sequential quadratic program with
    analytic gradients; the best feasible result wins, deterministically.
    """
    from scipy import optimize

    scale = max(np.abs(g).max() for g in gamma_diag_by_m)
    if scale == 0.0:
        # objective-free sector: the identity blocks are feasible
        return 0.0, [np.eye(d) for d in dims], 0.0
    gammas = [g / scale for g in gamma_diag_by_m]
    sizes = [d * d for d in dims]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total_len = int(offsets[-1])

    def unpack(x):
        return [
            x[offsets[i]: offsets[i + 1]].reshape(dims[i], dims[i])
            for i in range(len(dims))
        ]

    def neg_obj(x):
        return -sum(
            float(np.einsum("d,de,de->", g, L, L))
            for g, L in zip(gammas, unpack(x))
        )

    def neg_obj_grad(x):
        ls = unpack(x)
        return -np.concatenate(
            [(2.0 * g[:, None] * L).ravel() for g, L in zip(gammas, ls)]
        )

    constraints = []
    for vecs, target in cons_vectors:

        def c_fun(x, vecs=vecs, target=target):
            ls = unpack(x)
            tot = 0.0
            for mi, v in vecs:
                w = ls[mi].T @ v
                tot += float(w @ w)
            return tot - target

        def c_jac(x, vecs=vecs):
            ls = unpack(x)
            grads = [np.zeros_like(L) for L in ls]
            for mi, v in vecs:
                grads[mi] += 2.0 * np.outer(v, ls[mi].T @ v)
            return np.concatenate([g.ravel() for g in grads])

        constraints.append({"type": "eq", "fun": c_fun, "jac": c_jac})

    x_id = np.concatenate([np.eye(d).ravel() for d in dims])
    best_val, best_omegas, best_res = -np.inf, None, np.inf
    for k in range(restarts):
        x0 = x_id if k == 0 else x_id + 0.4 * rng.standard_normal(total_len)
        res = optimize.minimize(
            neg_obj,
            x0,
            jac=neg_obj_grad,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-14},
        )
        residual = max(abs(c["fun"](res.x)) for c in constraints)
        val = -neg_obj(res.x)
        if residual < 1e-8 and val > best_val:
            best_val, best_res = val, residual
            best_omegas = [L @ L.T for L in unpack(res.x)]
        best_res = min(best_res, residual)
    if best_omegas is None:
        raise RuntimeError(
            f"seed optimization did not reach feasibility; best residual {best_res:.3e}"
        )
    return best_val * scale, best_omegas, best_res


def lm_mixed_optimize(n: int, r: float, restarts: int = 20, seed: int = 7) -> LmOptimum:
    """Optimize the seed of the covariant training measurement for purity r.

    Every magnetic block of every sector is a variable, not only the m = 0
    one.  Returns the optimized trace-norm surrogate (the machine error is
    (1 - delta_lm/2)/2) and the seed; the programmable machine supplies the
    unbeatable lower bound on the error.
    """
    if not 1 <= n <= 5:
        raise ValueError("seed optimization is desk-scale: n must be 1..5")
    if not 0.0 < r <= 1.0:
        raise ValueError("purity must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    total = 0.0
    blocks = {}
    worst_residual = 0.0
    for (ja2, jc2), (p_xi, grid) in gamma_up_blocks(n, r).items():
        m_values = list(range(-(ja2 + jc2), ja2 + jc2 + 1, 2))
        dims = []
        gamma_diag = []
        basis_by_m = []
        for m2 in m_values:
            basis = _m_basis(ja2, jc2, m2)
            basis_by_m.append(basis)
            dims.append(len(basis))
            gamma_diag.append(
                np.array(
                    [grid[(ma2 + ja2) // 2, (mc2 + jc2) // 2] for ma2, mc2 in basis]
                )
            )
        cons_vectors = []
        for j2 in range(abs(ja2 - jc2), ja2 + jc2 + 1, 2):
            vecs = []
            for mi, m2 in enumerate(m_values):
                if abs(m2) > j2:
                    continue
                cvec = _coupled_vector(ja2, jc2, j2, m2)
                vecs.append((mi, cvec))
            cons_vectors.append((vecs, float(j2 + 1)))
        val, omegas, residual = _optimize_sector(
            gamma_diag, cons_vectors, dims, rng, restarts
        )
        worst_residual = max(worst_residual, residual)
        total += p_xi * val
        for m2, om in zip(m_values, omegas):
            blocks[(ja2, jc2, m2)] = om
    delta = 2.0 * total
    return LmOptimum(delta_lm=delta, seed=SeedOperator(n=n, blocks=blocks))


def eyd_qubit(n: int) -> EydRates:
    """Estimate-and-discriminate machine rates for n pure copies per label.

    ``pe`` follows the continuous covariant estimation measurement,
    (1 - 2n/(3(n+2)))/2.  The excess risk over known-state discrimination is
    2/(3(n+2)); at n = 1 the optimal finite estimation measurement does
    strictly better and attains (4 - sqrt(2))/12.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pe = (1.0 - 2.0 * n / (3.0 * (n + 2))) / 2.0
    if n == 1:
        return EydRates(pe=pe, excess_risk=(4.0 - math.sqrt(2.0)) / 12.0)
    return EydRates(pe=pe, excess_risk=2.0 / (3.0 * (n + 2)))


def reversed_error(n: int) -> float:
    """Error when the data qubit is measured before the training set.

    One classical bit flows backwards, so the rate (1 - n/(6(n+1)))/2 stays
    above 5/12 however large the training set."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (1.0 - n / (6.0 * (n + 1))) / 2.0


# ---------------------------------------------------------------------------
# robustness of the trained machine
# ---------------------------------------------------------------------------


def _cg_matrix(j2: int, up_first: bool) -> np.ndarray:
    """Isometry from the spin-(j+1/2) subspace of C^2 (x) S_j (or S_j (x) C^2)
    into the product basis."""
    dim_in = j2 + 2
    rows = []
    for m_tot2 in range(j2 + 1, -j2 - 2, -2):
        col = np.zeros(2 * (j2 + 1))
        for s2, spin_idx in ((1, 0), (-1, 1)):
            m2 = m_tot2 - s2
            if abs(m2) > j2:
                continue
            cg = clebsch_gordan(
                HalfInt(1), HalfInt(s2), HalfInt(j2), HalfInt(m2), HalfInt(j2 + 1), HalfInt(m_tot2)
            )
            j_idx = (j2 - m2) // 2
            idx = spin_idx * (j2 + 1) + j_idx if up_first else j_idx * 2 + spin_idx
            col[idx] = cg
        rows.append(col)
    v = np.array(rows).T  # (2(j2+1), dim_in)
    assert v.shape[1] == dim_in
    return v


def _sym_projector(j2: int, up_first: bool) -> np.ndarray:
    v = _cg_matrix(j2, up_first)
    return v @ v.T


def _sigma_pair(n: int, r: float, j2: int):
    """Conditional three-part averages and the pure-state pair they must be
    proportional to, all on S_j (x) C^2 (x) S_j."""
    dj = j2 + 1
    dj1 = j2 + 2
    jz = spin_z_expectation(HalfInt(j2), r)
    j = j2 / 2.0
    p_ab = _sym_projector(j2, up_first=False)  # on S_j (x) C^2
    p_bc = _sym_projector(j2, up_first=True)  # on C^2 (x) S_j
    eye_j = np.eye(dj)
    eye_2 = np.eye(2)
    sigma0 = np.kron(
        (r * jz / j) * p_ab / dj1 + ((j - r * jz) / j) * np.kron(eye_j / dj, eye_2 / 2),
        eye_j / dj,
    )
    sigma1 = np.kron(
        eye_j / dj,
        (r * jz / j) * p_bc / dj1 + ((j - r * jz) / j) * np.kron(eye_2 / 2, eye_j / dj),
    )
    pure0 = np.kron(p_ab / dj1, eye_j / dj)
    pure1 = np.kron(eye_j / dj, p_bc / dj1)
    return sigma0, sigma1, pure0, pure1, r * jz / j


def robustness_factors(n: int, r: float, delta: float = 0.0) -> RobustnessFactors:
    """Noise and training-fluctuation scaling of the trained machine.

    Returns the factor r (1 - (1-r)/(n r^2)) by which the conditional
    averages shrink relative to the pure equal-split problem, and the
    resulting excess-risk prediction 1/(3 n r).  The fluctuation amplitude
    ``delta`` only enters beyond this order and is accepted for the record.
    Before returning, the underlying equal-spin identity is re-verified
    exactly on every sector with spin at most 2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < r <= 1.0:
        raise ValueError("purity must lie in (0, 1]")
    if not math.isfinite(delta):
        raise ValueError("delta must be finite")
    start = 1 if n % 2 else 2
    for j2 in range(start, min(8, n) + 1, 2):
        sigma0, sigma1, pure0, pure1, factor = _sigma_pair(n, r, j2)
        lhs = sigma0 - sigma1
        rhs = factor * (pure0 - pure1)
        if np.abs(lhs - rhs).max() > 1e-12:
            raise AssertionError(
                f"conditional-average identity violated in sector 2j={j2}"
            )
    scaling = r * (1.0 - (1.0 - r) / (n * r * r))
    return RobustnessFactors(scaling=scaling, excess_risk=1.0 / (3.0 * n * r))
