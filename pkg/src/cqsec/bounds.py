"""Scalar security-bound calculators.

Variational distance, entropies, the averaged-to-individual guarantee
conversion via Markov's inequality, the whole-key sequence-error bound,
entropy continuity, and the Fano bit-error-rate chain. All entropies are
in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import CqEnsemble, average_state, require_distribution
from .linalg import all_commute, common_eigenbasis, von_neumann_entropy
from .tolerances import COMMUTE_TOL

LOG2_E = math.log2(math.e)


@dataclass(frozen=True)
class BoundReport:
    """One named bound value together with the formula that produced it."""

    name: str
    value: float
    formula_ref: str
    inputs: dict = field(default_factory=dict)
    note: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"bound {self.name!r} has non-finite value {self.value!r}")
        if not self.formula_ref:
            raise ValueError("formula_ref must be nonempty")

    def to_dict(self) -> dict:
        out = {"name": self.name, "value": self.value, "formula": self.formula_ref}
        if self.inputs:
            out["inputs"] = dict(self.inputs)
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class FailureBudget:
    """Averaged guarantee eps converted to individual thresholds.

    Each application of Markov's inequality guarantees level sigma except
    with probability eps / sigma; ``total_failure`` is the optimized
    combined failure probability (uses + 1) * eps^(1 / (uses + 1)), capped
    at 1. For a single split the exact two-level failure probability and
    its numerically minimized counterpart are included for cross-checking.
    """

    eps: float
    uses: int
    sigmas: tuple[float, ...]
    total_failure: float
    exact_two_level: float | None = None
    exact_minimized: float | None = None


def _pow_base2(x: float, exponent: float) -> float:
    """x ** exponent computed through base 2, exact for dyadic x with
    dyadic result (e.g. the cube root of 2^-21 is exactly 2^-7)."""
    return 2.0 ** (math.log2(x) * exponent)


def _golden_section_min(f, lo: float, hi: float, iters: int = 200) -> float:
    """Argmin of a unimodal function on [lo, hi] by golden-section search."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def variational_distance(p, q, halved: bool = True) -> float:
    """Classical distance sum |P_i - Q_i|, halved by default.

    The halved convention matches the ensemble criterion d; the unhalved
    convention is what the biased counter-example quotes as v(P, U) = eps.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distributions differ in length: {p.shape} vs {q.shape}")
    total = float(np.abs(p - q).sum())
    return 0.5 * total if halved else total


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2(1-p), zero at the endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {p!r}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def inverse_binary_entropy(h: float) -> float:
    """The unique p in [0, 1/2] with H(p) = h, by bisection."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"entropy out of [0, 1]: {h!r}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(100):  # interval shrinks to ~1e-31, past the 1e-12 target
        mid = (lo + hi) / 2.0
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def shannon_entropy(p) -> float:
    """Entropy of a classical distribution in bits."""
    p = require_distribution(p)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def entropy_lower_bound(n: int, eps: float) -> float:
    """Entropy continuity floor n - eps * (n + log2(1/eps)).

    Valid only for eps <= 1/2 where the continuity theorem applies;
    larger eps is rejected rather than silently extrapolated.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    if eps > 0.5:
        raise ValueError(
            f"entropy continuity bound is only valid for eps <= 1/2, got {eps!r}"
        )
    if eps == 0.0:
        return float(n)
    return float(n - eps * (n + math.log2(1.0 / eps)))


def markov_failure_budget(eps: float, uses: int) -> FailureBudget:
    """Optimal thresholds for converting an average guarantee to individual ones.

    Minimizing the combined failure probability over equal thresholds gives
    sigma = eps^(1/(uses+1)) and total failure (uses+1) * sigma. Powers are
    computed through base 2 so dyadic inputs produce exact dyadic levels.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be strictly inside (0, 1), got {eps!r}")
    if uses not in (1, 2, 3):
        raise ValueError(f"uses must be 1, 2 or 3, got {uses!r}")
    sigma = _pow_base2(eps, 1.0 / (uses + 1))
    total = min(1.0, (uses + 1) * sigma)
    exact = exact_min = None
    if uses == 1:
        def two_level(s: float) -> float:
            return 1.0 - (1.0 - s) * (1.0 - eps / s)

        exact = two_level(sigma)
        exact_min = two_level(_golden_section_min(two_level, eps, 1.0))
    return FailureBudget(
        eps=eps,
        uses=uses,
        sigmas=(sigma,) * uses,
        total_failure=total,
        exact_two_level=exact,
        exact_minimized=exact_min,
    )


def sequence_error_bound(num_keys: float, eps: float) -> BoundReport:
    """Guaranteed cap on whole-key guessing success: 1/N + 3 eps^(1/3).

    The cube-root term is the two-application Markov budget; pass
    ``math.inf`` for ``num_keys`` to get the asymptotic value.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    cube_root = _pow_base2(eps, 1.0 / 3.0) if eps > 0.0 else 0.0
    value = 1.0 / num_keys + 3.0 * cube_root
    keys = float(num_keys) if math.isfinite(num_keys) else None
    return BoundReport(
        name="whole-key-success-bound",
        value=value,
        formula_ref="sequence-error-bound",
        inputs={"num_keys": keys, "eps": eps},
    )


def fano_ber_deviation(eps: float) -> BoundReport:
    """Cap on how far an attacker's bit error rate can sit below one half.

    value = eps^(1/4) / (2 sqrt(log2 e)). The derivation assumes the
    deviation is small; values of a quarter or more carry a validity note.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps!r}")
    value = _pow_base2(eps, 0.25) / (2.0 * math.sqrt(LOG2_E))
    note = None
    if value >= 0.25:
        note = "deviation this large is outside the small-deviation regime; treat as indicative"
    return BoundReport(
        name="ber-deviation-bound",
        value=value,
        formula_ref="ber-deviation-bound",
        inputs={"eps": eps},
        note=note,
    )


def fano_ber_floor(n: int, h_k: float, i_ac: float) -> float:
    """Floor on any attacker's bit error rate from n H(p_b) >= H(K) - I_ac."""
    if i_ac < 0.0:
        raise ValueError(f"information must be nonnegative, got {i_ac!r}")
    if h_k > n + 1e-9:
        raise ValueError(f"H(K) = {h_k!r} exceeds the key length {n}")
    ratio = (h_k - i_ac) / n
    return inverse_binary_entropy(min(1.0, max(0.0, ratio)))


def accessible_information_classical(ens: CqEnsemble, tol: float = COMMUTE_TOL) -> float:
    """Mutual information I(K;Y) of the shared-eigenbasis measurement.

    For commuting (classical) ensembles this measurement is optimal, so
    the value is the accessible information exactly. Non-commuting
    ensembles are rejected; use ``holevo_bound`` for those.
    """
    states = [e.state for e in ens.entries]
    if not all_commute(states, tol=tol):
        raise ValueError("states do not commute; accessible information is exact "
                         "only for classical ensembles (use holevo_bound)")
    basis = common_eigenbasis(states, gap_tol=tol)
    joint = np.array([
        [prob * float((basis[:, y].conj() @ state @ basis[:, y]).real)
         for y in range(ens.dim)]
        for _, prob, state in ens.entries
    ])
    joint = np.clip(joint, 0.0, None)
    p_k = joint.sum(axis=1)
    p_y = joint.sum(axis=0)
    info = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            q = joint[i, j]
            if q > 0.0:
                info += q * math.log2(q / (p_k[i] * p_y[j]))
    return max(0.0, float(info))


def holevo_bound(ens: CqEnsemble) -> float:
    """Entropy bound on accessible information: S(rho_E) - sum p(k) S(rho^k)."""
    chi = von_neumann_entropy(average_state(ens))
    for _, prob, state in ens.entries:
        if prob > 0.0:
            chi -= prob * von_neumann_entropy(state)
    return max(0.0, float(chi))
