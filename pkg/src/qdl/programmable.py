"""Programmable discrimination machines for qubits.

A device with two program ports (n copies of each unknown state) and one
data port (nprime copies of the state to label) is optimal when it
discriminates the two direction-averaged global states.  Averaging makes
those states block diagonal over total-spin sectors, so every rate below
reduces to small per-sector computations: binomial overlaps for pure
states, and multiplicity-weighted trace norms of small rotated blocks for
mixed states of known or unknown purity.  Error margins interpolate between
the unambiguous and minimum-error extremes.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import special as _sp

from .angular import (
    block_coefficient,
    jordan_overlap,
    multiplicity_table,
    wigner6j_batch,
)

# discarded total block mass in the mixed-state sums; the induced error on
# the error probability is at most a quarter of this
_MASS_TOL = 1e-14


class Rates(NamedTuple):
    q: float
    pe: float


@dataclass(frozen=True)
class PortLoad:
    """Copies fed to the two program ports (a, c) and the data port (b)."""

    n_a: int
    n_b: int
    n_c: int

    def __post_init__(self):
        if min(self.n_a, self.n_b, self.n_c) < 1:
            raise ValueError("every port must carry at least one copy")

    def canonical(self) -> "PortLoad":
        """The two program ports are interchangeable; orient n_a >= n_c."""
        if self.n_a >= self.n_c:
            return self
        return PortLoad(self.n_c, self.n_b, self.n_a)


@dataclass(frozen=True)
class PuritySpec:
    """Purity prior: a known value or one of three unbiased distributions."""

    kind: str
    r: float | None = None

    _KINDS = ("fixed", "hard-sphere", "bures", "chernoff")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}, got {self.kind!r}")
        if self.kind == "fixed":
            if self.r is None or not 0.0 <= self.r <= 1.0:
                raise ValueError("fixed purity requires r in [0, 1]")
        elif self.r is not None:
            raise ValueError(f"prior {self.kind!r} takes no purity value")


def pure_rates(n: int, nprime: int) -> Rates:
    """Inconclusive rate Q and minimum error Pe for pure states with n copies
    at each program port and nprime at the data port."""
    if n < 1 or nprime < 1:
        raise ValueError("n and nprime must be >= 1")
    q = 1.0 - n * nprime / ((n + 1) * (nprime + 2))
    d = (n + 1) * (n + nprime + 1)
    pe_sum = 0.0
    for k in range(n + 1):
        c = jordan_overlap(n, nprime, k)
        pe_sum += (nprime + 2 * k + 1) / d * math.sqrt(max(0.0, 1.0 - c * c))
    return Rates(q=q, pe=(1.0 - pe_sum) / 2.0)


def general_rates(load: PortLoad) -> Rates:
    """Q and Pe for an arbitrary number of copies at every port.

    The two global states may differ in dimension; the part of the larger
    support outside the common one never produces errors, which yields the
    first (dimension-mismatch) term of Q.
    """
    load = load.canonical()
    na, nb, nc = load.n_a, load.n_b, load.n_c
    d1 = (na + nb + 1) * (nc + 1)
    d2 = (na + 1) * (nb + nc + 1)
    d_abc = na + nb + nc + 1

    def c2(k: int) -> float:
        num = math.comb(na + nb - nc + k, nb) * math.comb(nb + k, nb)
        den = math.comb(na + nb, nb) * math.comb(nc + nb, nb)
        return num / den

    q = 0.5 * (1 / math.sqrt(d1) - 1 / math.sqrt(d2)) ** 2 * d_abc
    pe = 0.0
    for k in range(nc + 1):
        dim_j = na + nb - nc + 2 * k + 1
        q += dim_j * math.sqrt(c2(k)) / math.sqrt(d1 * d2)
        pe -= (
            (d1 + d2)
            / (d1 * d2)
            * dim_j
            * math.sqrt(max(0.0, 1.0 - 4.0 * d1 * d2 / (d1 + d2) ** 2 * c2(k)))
        )
    pe = 0.25 * (1.0 + d1 / d2 + pe)
    return Rates(q=q, pe=pe)


def zeta_series(x: float, tol: float = 1e-15) -> float:
    """sum_k (1 - sqrt(1 - x^k)) for 0 < x < 1; converges geometrically."""
    total = 0.0
    k = 0
    while True:
        term = 1.0 - math.sqrt(1.0 - x**k)
        total += term
        if k > 0 and term < tol:
            return total
        k += 1


def pure_asymptotics(mode: str, n: int | None = None, nprime: int | None = None) -> Rates:
    """Closed-form limiting rates of the pure-state machine.

    mode="program-limit": infinitely many program copies, nprime data copies
        (pass n to include the 1 - 1/n approach of the error term).
    mode="data-limit": infinitely many data copies, n program copies; the
        machine degenerates to state comparison.
    mode="symmetric": n = nprime large; both rates decay as 1/n.
    """
    if mode == "program-limit":
        if nprime is None or nprime < 1:
            raise ValueError("program-limit requires nprime >= 1")
        q = 2.0 / (nprime + 2)
        pe = 0.5 - (
            math.sqrt(math.pi)
            / 4.0
            * math.gamma(1.0 + 1.0 / nprime)
            / math.gamma(1.5 + 1.0 / nprime)
        ) * (1.0 - (1.0 / n if n else 0.0))
        return Rates(q=q, pe=pe)
    if mode == "data-limit":
        if n is None or n < 1:
            raise ValueError("data-limit requires n >= 1")
        return Rates(q=1.0 / (n + 1), pe=1.0 / (2 * (n + 1)))
    if mode == "symmetric":
        if n is None or n < 1:
            raise ValueError("symmetric requires n >= 1")
        return Rates(q=3.0 / n, pe=0.75 * zeta_series(0.25) / n)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# mixed states: block sums
# ---------------------------------------------------------------------------


def _coeff_table(m: int, r: float) -> np.ndarray:
    """Block coefficient of an m-fold power, indexed by the doubled spin."""
    out = np.zeros(m + 1)
    for j2 in range(m % 2, m + 1, 2):
        out[j2] = block_coefficient(m, j2 / 2, r)
    return out


def _nu_array(m: int) -> np.ndarray:
    return np.array(multiplicity_table(m), dtype=float)


@lru_cache(maxsize=64)
def _port_spins(m: int) -> tuple:
    return tuple(range(m % 2, m + 1, 2))


def _block_error(n: int, nprime: int, coeff_n: np.ndarray, coeff_t: np.ndarray) -> float:
    """Minimum error from the sector-by-sector trace norms.

    ``coeff_n`` and ``coeff_t`` are the (possibly prior-averaged) block
    coefficient tables of the n-fold and (n+nprime)-fold powers.  Sectors are
    labelled by the port spins and the total spin; equivalent representations
    enter only through multiplicative weights.  Sectors whose combined trace
    weight is negligible (total discarded mass below _MASS_TOL) are skipped
    before any 6j symbol is evaluated.
    """
    total_n = n + nprime
    nu_n = _nu_array(n)
    nu_p = _nu_array(nprime)
    ja_vals = _port_spins(n)
    jb_vals = _port_spins(nprime)

    # mass of each (ja, jb, jc) triple: its total trace-weight contribution
    # to gamma * (tr sigma1 + tr sigma2), summed in closed form over J
    triples = []
    for ja2 in ja_vals:
        for jb2 in jb_vals:
            jab_rng = range(abs(ja2 - jb2), min(ja2 + jb2, total_n) + 1, 2)
            s_ab = sum((x2 + 1) * coeff_t[x2] for x2 in jab_rng)
            for jc2 in ja_vals:
                jbc_rng = range(abs(jb2 - jc2), min(jb2 + jc2, total_n) + 1, 2)
                s_bc = sum((x2 + 1) * coeff_t[x2] for x2 in jbc_rng)
                nu3 = nu_n[ja2] * nu_p[jb2] * nu_n[jc2]
                mass = nu3 * (
                    (jc2 + 1) * coeff_n[jc2] * s_ab + (ja2 + 1) * coeff_n[ja2] * s_bc
                )
                triples.append((mass, ja2, jb2, jc2, nu3))

    triples.sort(key=lambda t: t[0])
    masses = np.array([t[0] for t in triples])
    cum = np.cumsum(masses)
    first_kept = int(np.searchsorted(cum, _MASS_TOL, side="right"))

    # enumerate sectors of the kept triples, grouped by block dimension
    groups: dict[int, list] = {}
    for mass, ja2, jb2, jc2, nu3 in triples[first_kept:]:
        jab_all = range(abs(ja2 - jb2), ja2 + jb2 + 1, 2)
        jbc_all = range(abs(jb2 - jc2), jb2 + jc2 + 1, 2)
        j_lo = min(abs(x2 - jc2) for x2 in jab_all)
        j_hi = ja2 + jb2 + jc2
        for j2 in range(j_lo, j_hi + 1, 2):
            jab = [x2 for x2 in jab_all if abs(x2 - jc2) <= j2 <= x2 + jc2]
            jbc = [x2 for x2 in jbc_all if abs(ja2 - x2) <= j2 <= ja2 + x2]
            if not jab:
                continue
            groups.setdefault(len(jab), []).append(
                (ja2, jb2, jc2, j2, jab, jbc, nu3 * (j2 + 1))
            )

    total = 0.0
    for dim, blocks in groups.items():
        nb = len(blocks)
        ja2 = np.array([b[0] for b in blocks])
        jb2 = np.array([b[1] for b in blocks])
        jc2 = np.array([b[2] for b in blocks])
        j2 = np.array([b[3] for b in blocks])
        jab2 = np.array([b[4] for b in blocks])
        jbc2 = np.array([b[5] for b in blocks])
        gamma = np.array([b[6] for b in blocks])

        six = wigner6j_batch(
            ja2[:, None, None],
            jb2[:, None, None],
            jab2[:, :, None],
            jc2[:, None, None],
            j2[:, None, None],
            jbc2[:, None, :],
        )
        phase = np.where(((ja2 + jb2 + jc2 + j2) // 2) % 2 == 0, 1.0, -1.0)
        lam = (
            phase[:, None, None]
            * np.sqrt((jab2[:, :, None] + 1.0) * (jbc2[:, None, :] + 1.0))
            * six
        )
        s1 = coeff_t[jab2] * coeff_n[jc2][:, None]
        s2 = coeff_n[ja2][:, None] * coeff_t[jbc2]
        m = -np.einsum("bij,bj,bkj->bik", lam, s2, lam)
        idx = np.arange(dim)
        m[:, idx, idx] += s1
        w = np.linalg.eigvalsh(m)
        total += float((gamma * np.abs(w).sum(axis=1)).sum())
    return (1.0 - total / 2.0) / 2.0


def mixed_error(n: int, nprime: int, r: float) -> float:
    """Minimum error of the programmable machine for states of known purity r.

    Reduces to :func:`pure_rates` at r = 1 and decreases with r.
    """
    if n < 1 or nprime < 1:
        raise ValueError("n and nprime must be >= 1")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"purity {r} outside [0, 1]")
    return _block_error(n, nprime, _coeff_table(n, r), _coeff_table(n + nprime, r))


def mixed_asymptote(n: int, r: float) -> float:
    """Large-n error 1/2 - r/3 + 1/(3 n r) for one data copy.

    The expansion breaks down for purities of order 1/n; r = 0 is singular.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < r <= 1.0:
        raise ValueError("purity must lie in (0, 1]; the r = 0 limit is singular")
    return 0.5 - r / 3.0 + 1.0 / (3.0 * n * r)


def averaged_block_coefficient(kind: str, m: int, j) -> float:
    """Block coefficient of an m-fold power averaged over a purity prior.

    kind "hard-sphere" uses w(r) ~ r^2, "bures" w(r) ~ r^2/sqrt(1-r^2), and
    "chernoff" the distinguishability-induced measure, whose average comes
    out as sums of incomplete beta functions.
    """
    from .angular import HalfInt

    j2 = HalfInt.coerce(j).twice
    if (m - j2) % 2 or j2 < 0 or j2 > m:
        raise ValueError(f"j={HalfInt(j2)} invalid for m={m}")
    half_m = m / 2.0
    jv = j2 / 2.0
    if kind == "hard-sphere":
        return 6.0 * math.exp(
            math.lgamma(half_m + jv + 2.0)
            + math.lgamma(half_m - jv + 1.0)
            - math.lgamma(m + 4.0)
        )
    if kind == "bures":
        return (4.0 / math.pi) * math.exp(
            math.lgamma(half_m + jv + 1.5)
            + math.lgamma(half_m - jv + 0.5)
            - math.lgamma(m + 3.0)
        )
    if kind == "chernoff":
        total = 0.0
        for mm2 in range(-j2, j2 + 1, 2):
            a1, b1 = (m + 1 - mm2) / 2.0, (m + 1 + mm2) / 2.0
            a2, b2 = (m - mm2 + 2) / 2.0, (m + mm2 + 2) / 2.0
            total += _beta_inc(a1, b1) - 2.0 * _beta_inc(a2, b2)
        return 2.0 / ((math.pi - 2.0) * (j2 + 1)) * total
    raise ValueError(f"unknown prior kind {kind!r}")


def _beta_inc(a: float, b: float) -> float:
    """Unregularized incomplete beta B_x(a, b) at x = 1/2."""
    return float(_sp.betainc(a, b, 0.5)) * math.exp(_sp.betaln(a, b))


def _avg_coeff_table(kind: str, m: int) -> np.ndarray:
    out = np.zeros(m + 1)
    for j2 in range(m % 2, m + 1, 2):
        out[j2] = averaged_block_coefficient(kind, m, j2 / 2)
    return out


def universal_error(prior: PuritySpec, n: int, nprime: int) -> float:
    """Minimum error of the fully universal machine under a purity prior.

    A fixed-purity prior degenerates to :func:`mixed_error`; the isotropic
    direction average is unchanged, so only the block coefficients are
    replaced by their prior averages.
    """
    if n < 1 or nprime < 1:
        raise ValueError("n and nprime must be >= 1")
    if prior.kind == "fixed":
        return mixed_error(n, nprime, prior.r)
    return _block_error(
        n, nprime, _avg_coeff_table(prior.kind, n), _avg_coeff_table(prior.kind, n + nprime)
    )


# ---------------------------------------------------------------------------
# error margins
# ---------------------------------------------------------------------------


class MarginCurve(NamedTuple):
    """Success rate at a global margin with the per-sector margins and the
    (weak) saturation points where sectors freeze at their critical values."""

    p_success: float
    per_subspace_margins: tuple
    saturation_points: tuple


@lru_cache(maxsize=128)
def _margin_tables(n: int, nprime: int):
    """Per-sector overlaps, weights, critical margins and saturation ladder."""
    count = n + 1
    c = np.array([jordan_overlap(n, nprime, k) for k in range(count)])
    p = np.array(
        [(nprime + 2 * k + 1) / ((n + 1) * (n + nprime + 1)) for k in range(count)]
    )
    rc = (1.0 - np.sqrt(np.maximum(0.0, 1.0 - c * c))) / 2.0
    # xi[b]: frozen-error mass below sector b; chi[b]: remaining 1-c weight
    xi = np.concatenate([[0.0], np.cumsum(p * rc)])
    chi = np.concatenate([np.cumsum((p * (1.0 - c))[::-1])[::-1], [0.0]])
    r_global = float(np.sum(p * rc))
    sat = []
    for b in range(count - 1):
        sat.append(rc[b] / (1.0 - c[b]) * chi[b] + xi[b])
    sat.append(r_global)
    psat = np.concatenate(
        [[0.0], np.cumsum(0.5 * p * (1.0 + np.sqrt(np.maximum(0.0, 1.0 - c * c))))]
    )
    return c, p, rc, xi, chi, np.array(sat), psat, r_global


def _weak_eval(n: int, nprime: int, big_r: float):
    """Success rate and per-sector weak margins at global weak margin big_r."""
    c, p, rc, xi, chi, sat, psat, r_global = _margin_tables(n, nprime)
    count = n + 1
    if big_r >= r_global:
        ps = 1.0 - pure_rates(n, nprime).pe
        return ps, np.array(rc), sat
    b = bisect.bisect_left(sat, big_r)  # sectors 0..b-1 are frozen
    margins = np.array(rc)
    if chi[b] > 0.0:
        margins[b:] = (1.0 - c[b:]) * (big_r - xi[b]) / chi[b]
    else:
        # only the totally symmetric sector (c = 1) remains: the success
        # rate grows linearly with the allowed error
        margins[count - 1] = (big_r - xi[b]) / p[count - 1]
    ps = psat[b] + (math.sqrt(max(0.0, big_r - xi[b])) + math.sqrt(chi[b])) ** 2
    return ps, margins, sat


def _weak_from_strong(n: int, nprime: int, r_strong: float) -> float:
    """Invert the strong->weak margin map r_s = r_w / (P_s(r_w) + r_w).

    Piecewise closed form: inside each saturation interval P_s(r_w) is a
    shifted square-root square, so the inverse solves a quadratic in
    sqrt(r_w - xi_b).
    """
    c, p, rc, xi, chi, sat, psat, r_global = _margin_tables(n, nprime)
    if r_strong >= r_global:
        return r_global
    # strong saturation ladder through the same measurement correspondence
    sat_strong = []
    for b, rw in enumerate(sat):
        ps, _, _ = _weak_eval(n, nprime, rw)
        sat_strong.append(rw / (ps + rw) if ps + rw > 0 else 0.0)
    b = bisect.bisect_left(sat_strong, r_strong)
    s = r_strong
    # s * (psat_b + (u + sqrt(chi_b))^2 + xi_b + u^2) = xi_b + u^2
    a2 = 2.0 * s - 1.0
    a1 = 2.0 * s * math.sqrt(chi[b])
    a0 = s * (psat[b] + chi[b] + xi[b]) - xi[b]
    if abs(a2) < 1e-15:
        u = -a0 / a1 if a1 != 0.0 else 0.0
    else:
        disc = max(0.0, a1 * a1 - 4.0 * a2 * a0)
        u = (-a1 + math.sqrt(disc)) / (2.0 * a2)
        if u < 0.0:
            u = (-a1 - math.sqrt(disc)) / (2.0 * a2)
    u = max(0.0, u)
    return min(xi[b] + u * u, r_global)


def margin_success(n: int, nprime: int, big_r: float, scheme: str = "weak") -> MarginCurve:
    """Maximum success rate of the machine under a global error margin.

    The weak condition bounds the average mislabeling rate; the strong one
    bounds each conditional mislabeling probability and maps onto a tighter
    weak margin.  At zero margin the rate equals the unambiguous success
    rate, and beyond the critical margin it equals one minus the
    minimum-error rate.  Per-sector margins saturate at their critical
    values in order of increasing sector overlap.
    """
    if n < 1 or nprime < 1:
        raise ValueError("n and nprime must be >= 1")
    if not 0.0 <= big_r <= 1.0:
        raise ValueError(f"margin {big_r} outside [0, 1]")
    if scheme == "weak":
        ps, margins, sat = _weak_eval(n, nprime, big_r)
        return MarginCurve(ps, tuple(margins), tuple(sat))
    if scheme != "strong":
        raise ValueError(f"scheme must be 'weak' or 'strong', got {scheme!r}")
    rw = _weak_from_strong(n, nprime, big_r)
    ps, weak_margins, sat = _weak_eval(n, nprime, rw)
    c, p, rc, *_ = _margin_tables(n, nprime)
    strong_margins = []
    for k, (rm, ck) in enumerate(zip(weak_margins, c)):
        if ck >= 1.0:
            strong_margins.append(0.5)  # the symmetric sector is always frozen
        elif rm >= rc[k] - 1e-15:
            strong_margins.append(rc[k])
        else:
            psk = (math.sqrt(rm) + math.sqrt(1.0 - ck)) ** 2
            strong_margins.append(rm / (psk + rm))
    return MarginCurve(ps, tuple(strong_margins), tuple(sat))
