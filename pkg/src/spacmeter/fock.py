"""Truncated number-basis engine: the matrix oracle for the pointer readout.

Everything here is basis-exact linear algebra on explicit vectors: the
pointer state is written out in the number basis, displacement operators are
dense matrices built from a stable scaled-Laguerre recurrence, and all
expectation values come from tridiagonal ladder action.  By design this
module imports nothing from the closed-form engine, so agreement between the
two is meaningful evidence rather than circular bookkeeping.

Truncation is certified, not assumed: every adaptive entry point grows the
cutoff until the input state tail, the displaced-branch guard band, and the
assembled output guard band all fall below the policy tolerance, and raises
TruncationInsufficient if the cap is reached first.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import (
    Coupling,
    PointerMoments,
    PointerParams,
    SelectionParams,
    postselection_probability,
    weak_value,
)

# Columns whose truncation loss exceeds this are outside the safe subspace.
SAFE_COLUMN_LOSS = 1e-12

HARD_DIM_CAP = 4096


class TruncationInsufficient(RuntimeError):
    """The Fock cutoff hit its cap before convergence could be certified."""


@dataclass(frozen=True)
class TruncationPolicy:
    """How aggressively to truncate and when to give up.

    initial_dim of None lets the starting cutoff be sized from the pointer
    amplitude and the displacement reach; an explicit value overrides that.
    """

    initial_dim: int | None = None
    growth: int = 2
    tail_tol: float = 1e-14
    guard_band: int = 8
    max_dim: int = HARD_DIM_CAP

    def __post_init__(self) -> None:
        if self.initial_dim is not None and self.initial_dim < 8:
            raise ValueError("initial_dim must be at least 8")
        if self.growth < 2:
            raise ValueError("growth factor must be at least 2")
        if not 0.0 < self.tail_tol <= 1e-6:
            raise ValueError("tail_tol must lie in (0, 1e-6]")
        if self.guard_band < 1:
            raise ValueError("guard_band must be positive")
        if self.max_dim < 64:
            raise ValueError("max_dim must be at least 64")

    def starting_dim(self, pointer: PointerParams, strength: float) -> int:
        if self.initial_dim is not None:
            return min(self.initial_dim, self.max_dim)
        # Displaced support concentrates near (r + strength/2)^2 photons.
        reach = (pointer.r + abs(strength) / 2.0 + 6.0) ** 2
        dim = max(64, math.ceil(reach))
        dim = ((dim + 31) // 32) * 32
        return min(dim, self.max_dim)


@dataclass(frozen=True)
class FockVector:
    """Truncated amplitude vector with its convergence certificate."""

    amplitudes: np.ndarray
    n_max: int
    tail_mass: float


@dataclass(frozen=True)
class FockOperator:
    """Dense operator with the column range its truncation kept trustworthy."""

    matrix: np.ndarray
    label: str
    safe_dim: int

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def unitarity_defect(self) -> float:
        """Max deviation of adjoint(D) D from identity on the safe subspace."""
        if self.safe_dim == 0:
            return float("inf")
        block = self.matrix[:, : self.safe_dim]
        gram = block.conj().T @ block
        gram -= np.eye(self.safe_dim)
        return float(np.max(np.abs(gram)))


@dataclass(frozen=True)
class AssembledState:
    """Normalized kept-outcome pointer state plus the raw combination norm."""

    state: FockVector
    norm_sq: float                # squared norm of the two-branch combination
    success_probability: float    # exact strength-dependent keep probability


def _build_displacement(mu: complex, dim: int) -> np.ndarray:
    """Dense D(mu) from the scaled associated-Laguerre recurrence.

    The recurrence runs directly on the scaled entries
        t_n(d) = sqrt(n! / (n+d)!) |mu|^d exp(-|mu|^2/2) L_n^(d)(|mu|^2),
    all bounded by 1, so it stays stable far past the cutoff where the bare
    prefactor-times-polynomial form overflows.
    """
    out = np.zeros((dim, dim), dtype=np.complex128)
    if mu == 0:
        np.fill_diagonal(out, 1.0)
        return out
    x = abs(mu) ** 2
    offsets = np.arange(dim, dtype=np.float64)
    lgam = np.array([math.lgamma(k + 1.0) for k in range(dim)])
    t_curr = np.exp(-0.5 * x + offsets * math.log(abs(mu)) - 0.5 * lgam)
    t_prev = np.zeros(dim)
    arg = cmath.phase(mu)
    down = np.exp(1j * offsets * arg)
    up = np.exp(-1j * offsets * arg)
    up[1::2] *= -1.0  # (-mu*)^d alternation for the upper triangle
    out[:, 0] = t_curr * down
    out[0, :] = t_curr * up
    for n in range(1, dim):
        t_next = (
            (2.0 * n - 1.0 + offsets - x) * t_curr
            - np.sqrt((n - 1.0) * (n - 1.0 + offsets)) * t_prev
        ) / np.sqrt(n * (n + offsets))
        t_prev, t_curr = t_curr, t_next
        keep = dim - n
        out[n:, n] = t_curr[:keep] * down[:keep]
        out[n, n:] = t_curr[:keep] * up[:keep]
    return out


@lru_cache(maxsize=96)
def _displacement(mu: complex, dim: int) -> tuple[np.ndarray, int]:
    """Cached displacement matrix and the size of its safe subspace."""
    matrix = _build_displacement(mu, dim)
    losses = 1.0 - (np.abs(matrix) ** 2).sum(axis=0)
    over = losses > SAFE_COLUMN_LOSS
    safe_dim = dim if not over.any() else int(np.argmax(over))
    matrix.flags.writeable = False
    return matrix, safe_dim


def displacement_operator(mu: complex, n_max: int) -> FockOperator:
    """Displacement matrix in the number basis, with safe-subspace size."""
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    matrix, safe_dim = _displacement(complex(mu), int(n_max))
    return FockOperator(matrix=matrix, label=f"displacement({complex(mu)})", safe_dim=safe_dim)


def _spac_amplitudes(pointer: PointerParams, dim: int) -> tuple[np.ndarray, float]:
    """Normalized pointer amplitudes and the exact mass lost to truncation."""
    if dim < 2:
        raise ValueError("need at least two levels")
    v = np.zeros(dim, dtype=np.complex128)
    if pointer.r == 0.0:
        v[1] = 1.0  # adding a photon to vacuum gives the one-photon state
        return v, 0.0
    n = np.arange(1.0, dim)
    # amplitude(n) = gamma exp(-r^2/2) r^(n-1) sqrt(n) / sqrt((n-1)!)
    lgam = np.array([math.lgamma(k) for k in range(1, dim)])
    log_mag = (
        0.5 * math.log(pointer.norm_factor_sq)
        - 0.5 * pointer.r * pointer.r
        + (n - 1.0) * math.log(pointer.r)
        + 0.5 * np.log(n)
        - 0.5 * lgam
    )
    v[1:] = np.exp(log_mag) * np.exp(1j * (n - 1.0) * pointer.theta)
    norm_sq = float(np.vdot(v, v).real)
    v /= math.sqrt(norm_sq)
    return v, _spac_tail(pointer, dim)


def _spac_tail(pointer: PointerParams, dim: int) -> float:
    """Ideal-state mass above the cutoff, summed from the omitted terms.

    1 - norm_sq would be swamped by ~1e-14 summation roundoff, which no
    cutoff growth can shrink; the series terms themselves underflow cleanly.
    """
    r_sq = pointer.r * pointer.r
    base = math.log(pointer.norm_factor_sq) - r_sq
    log_r_sq = math.log(r_sq)
    total = 0.0
    log_w = 0.0
    for k in range(dim, dim + 64):
        log_w = base + (k - 1.0) * log_r_sq + math.log(k) - math.lgamma(k + 1.0)
        total += math.exp(log_w)
    ratio = r_sq / (dim + 63.0)
    if ratio >= 1.0:
        return math.inf  # cutoff still inside the bulk; no honest bound yet
    return total + math.exp(log_w) * ratio / (1.0 - ratio)


def _adaptive(pointer: PointerParams, strength: float, policy: TruncationPolicy, build):
    """Grow the cutoff until `build` certifies convergence or the cap is hit."""
    dim = policy.starting_dim(pointer, strength)
    while True:
        result = build(dim)
        if result is not None:
            return result
        if dim >= policy.max_dim:
            raise TruncationInsufficient(
                f"no convergence below n_max={policy.max_dim} "
                f"(r={pointer.r}, strength={strength}, tail_tol={policy.tail_tol})"
            )
        dim = min(policy.max_dim, dim * policy.growth)


def _band_mass(v: np.ndarray, band: int) -> float:
    seg = v[-band:]
    return float(np.vdot(seg, seg).real)


def _converged_parts(pointer, strength, dim, policy):
    """Pointer vector and its two displaced branches, or None if unconverged."""
    psi, tail = _spac_amplitudes(pointer, dim)
    if tail > policy.tail_tol:
        return None
    matrix, safe_dim = _displacement(complex(strength / 2.0), dim)
    beyond = psi[safe_dim:]
    if float(np.vdot(beyond, beyond).real) > policy.tail_tol:
        return None
    up = matrix @ psi
    dn = matrix.conj().T @ psi  # adjoint displaces in the opposite direction
    band = policy.guard_band
    if _band_mass(up, band) > policy.tail_tol or _band_mass(dn, band) > policy.tail_tol:
        return None
    return psi, tail, up, dn


def spac_state(pointer: PointerParams, policy: TruncationPolicy | None = None) -> FockVector:
    """Photon-added coherent state as a certified truncated vector."""
    pol = policy or TruncationPolicy()

    def build(dim):
        psi, tail = _spac_amplitudes(pointer, dim)
        if tail > pol.tail_tol:
            return None
        return FockVector(amplitudes=psi, n_max=dim, tail_mass=tail)

    return _adaptive(pointer, 0.0, pol, build)


def assemble_final_state(
    sel: SelectionParams,
    pointer: PointerParams,
    coupling: Coupling,
    policy: TruncationPolicy | None = None,
) -> AssembledState:
    """Kept-outcome pointer state, normalized from the vector norm itself.

    The normalization is recomputed from the assembled vector, never taken
    from a closed form, which is what makes the norm a cross-engine check.
    """
    a = weak_value(sel)
    keep_prob = postselection_probability(sel)
    pol = policy or TruncationPolicy()

    def build(dim):
        parts = _converged_parts(pointer, coupling.strength, dim, pol)
        if parts is None:
            return None
        psi, tail, up, dn = parts
        combo = (1.0 + a) * up + (1.0 - a) * dn
        norm_sq = float(np.vdot(combo, combo).real)
        combo /= math.sqrt(norm_sq)
        out_band = _band_mass(combo, pol.guard_band)
        if out_band > pol.tail_tol:
            return None
        state = FockVector(amplitudes=combo, n_max=dim, tail_mass=tail + out_band)
        return AssembledState(
            state=state,
            norm_sq=norm_sq,
            success_probability=keep_prob * norm_sq / 4.0,
        )

    return _adaptive(pointer, coupling.strength, pol, build)


def observable_branch_state(
    sel: SelectionParams,
    pointer: PointerParams,
    coupling: Coupling,
    policy: TruncationPolicy | None = None,
) -> FockVector:
    """Unnormalized observable-weighted branch of the kept outcome.

    The sigma_x insertion flips the sign of the reverse-displaced branch:
    cos(phi/2) * [ (1+A) D(+G/2) - (1-A) D(-G/2) ] |pointer> / 2.
    """
    a = weak_value(sel)
    overlap = math.cos(sel.phi / 2.0)
    pol = policy or TruncationPolicy()

    def build(dim):
        parts = _converged_parts(pointer, coupling.strength, dim, pol)
        if parts is None:
            return None
        psi, tail, up, dn = parts
        branch = 0.5 * overlap * ((1.0 + a) * up - (1.0 - a) * dn)
        norm_sq = float(np.vdot(branch, branch).real)
        if norm_sq > 0.0:
            out_band = _band_mass(branch, pol.guard_band) / norm_sq
            if out_band > pol.tail_tol:
                return None
        else:
            out_band = 0.0
        return FockVector(amplitudes=branch, n_max=dim, tail_mass=tail + out_band)

    return _adaptive(pointer, coupling.strength, pol, build)


def transition_moment(
    sel: SelectionParams,
    pointer: PointerParams,
    coupling: Coupling,
    policy: TruncationPolicy | None = None,
) -> complex:
    """Oracle conditional observable value from the two assembled vectors.

    Ratio <B|C> / <B|B> of the plain and observable-weighted branch
    combinations; independent of every closed form in the package.
    """
    a = weak_value(sel)
    pol = policy or TruncationPolicy()

    def build(dim):
        parts = _converged_parts(pointer, coupling.strength, dim, pol)
        if parts is None:
            return None
        psi, tail, up, dn = parts
        combo = (1.0 + a) * up + (1.0 - a) * dn
        weighted = (1.0 + a) * up - (1.0 - a) * dn
        norm_sq = float(np.vdot(combo, combo).real)
        if _band_mass(combo, pol.guard_band) / norm_sq > pol.tail_tol:
            return None
        return complex(np.vdot(combo, weighted)) / norm_sq

    return _adaptive(pointer, coupling.strength, pol, build)


def _ladder_means(v: np.ndarray) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <n>) by tridiagonal ladder action, no dense matrices."""
    size = len(v)
    roots = np.sqrt(np.arange(1.0, size))
    av = np.zeros(size, dtype=np.complex128)
    av[:-1] = roots * v[1:]
    a2v = np.zeros(size, dtype=np.complex128)
    a2v[:-1] = roots * av[1:]
    mean_a = complex(np.vdot(v, av))
    mean_a2 = complex(np.vdot(v, a2v))
    mean_n = float(np.vdot(av, av).real)
    return mean_a, mean_a2, mean_n


def _quad_moments(v: np.ndarray, sigma: float) -> tuple[float, float, float, float, float]:
    """(meanX, meanP, meanX2, meanP2, meanN) for a normalized vector."""
    mean_a, mean_a2, mean_n = _ladder_means(v)
    mean_x = 2.0 * sigma * mean_a.real
    mean_p = mean_a.imag / sigma
    mean_x2 = sigma * sigma * (2.0 * mean_a2.real + 2.0 * mean_n + 1.0)
    mean_p2 = (2.0 * mean_n + 1.0 - 2.0 * mean_a2.real) / (4.0 * sigma * sigma)
    return mean_x, mean_p, mean_x2, mean_p2, mean_n


def moments(state: FockVector | np.ndarray, pointer: PointerParams) -> PointerMoments:
    """Quadrature statistics of a normalized state for the given pointer width."""
    v = state.amplitudes if isinstance(state, FockVector) else np.asarray(state)
    mean_x, mean_p, mean_x2, mean_p2, mean_n = _quad_moments(v, pointer.sigma)
    return PointerMoments(
        position_mean=mean_x,
        momentum_mean=mean_p,
        position_variance=mean_x2 - mean_x * mean_x,
        momentum_variance=mean_p2 - mean_p * mean_p,
        mean_excitation=mean_n,
    )


def nonpostselected_moments(
    sel: SelectionParams,
    pointer: PointerParams,
    coupling: Coupling,
    policy: TruncationPolicy | None = None,
) -> PointerMoments:
    """Pointer statistics when every outcome is kept.

    The reduced pointer state is the classical mixture of the two displaced
    branches with the preparation's sigma_x populations; cross terms vanish
    because the system branches are orthogonal.  Defined for every selection,
    including phi = pi.
    """
    up_amp = math.cos(sel.phi / 2.0) + cmath.exp(1j * sel.delta) * math.sin(sel.phi / 2.0)
    dn_amp = math.cos(sel.phi / 2.0) - cmath.exp(1j * sel.delta) * math.sin(sel.phi / 2.0)
    w_up = abs(up_amp) ** 2 / 2.0
    w_dn = abs(dn_amp) ** 2 / 2.0
    pol = policy or TruncationPolicy()

    def build(dim):
        parts = _converged_parts(pointer, coupling.strength, dim, pol)
        if parts is None:
            return None
        psi, tail, up, dn = parts
        m_up = _quad_moments(up, pointer.sigma)
        m_dn = _quad_moments(dn, pointer.sigma)
        mixed = [w_up * u + w_dn * d for u, d in zip(m_up, m_dn)]
        mean_x, mean_p, mean_x2, mean_p2, mean_n = mixed
        return PointerMoments(
            position_mean=mean_x,
            momentum_mean=mean_p,
            position_variance=mean_x2 - mean_x * mean_x,
            momentum_variance=mean_p2 - mean_p * mean_p,
            mean_excitation=mean_n,
        )

    return _adaptive(pointer, coupling.strength, pol, build)


def assemble_at_cutoff(
    sel: SelectionParams, pointer: PointerParams, strength: float, dim: int
) -> tuple[np.ndarray, float]:
    """Branch combination at a fixed cutoff, without convergence certification.

    Returns the normalized vector and the raw squared norm.  Meant for
    derivative estimates that need several strengths on one grid; certify
    the center point with assemble_final_state first.
    """
    a = weak_value(sel)
    psi, _ = _spac_amplitudes(pointer, dim)
    matrix, _ = _displacement(complex(strength / 2.0), dim)
    combo = (1.0 + a) * (matrix @ psi) + (1.0 - a) * (matrix.conj().T @ psi)
    norm_sq = float(np.vdot(combo, combo).real)
    return combo / math.sqrt(norm_sq), norm_sq


def commutator_residual(state: FockVector | np.ndarray, pointer: PointerParams) -> float:
    """|<[X, P]> - i| for a normalized state; small only when well truncated."""
    v = state.amplitudes if isinstance(state, FockVector) else np.asarray(state)
    size = len(v)
    roots = np.sqrt(np.arange(1.0, size))
    av = np.zeros(size, dtype=np.complex128)
    av[:-1] = roots * v[1:]
    adv = np.zeros(size, dtype=np.complex128)
    adv[1:] = roots * v[:-1]
    x_v = pointer.sigma * (av + adv)
    p_v = (0.5j / pointer.sigma) * (adv - av)
    # <XP> - <PX> = 2i Im <Xv|Pv> for Hermitian X, P
    return abs(2.0 * complex(np.vdot(x_v, p_v)).imag - 1.0)


def dump_csv(state: FockVector, path: str) -> None:
    """Write amplitudes as CSV rows (index, re, im) for inspection."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "amplitude.re", "amplitude.im"])
        for idx, amp in enumerate(state.amplitudes):
            writer.writerow([idx, repr(float(amp.real)), repr(float(amp.imag))])
