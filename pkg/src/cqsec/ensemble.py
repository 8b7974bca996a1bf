"""Classical-quantum key ensembles and the distance-to-ideal criterion.

An ensemble pairs every value of an n-bit key with a prior probability and
the density operator an eavesdropper would hold for that key value. The
central quantity is ``compute_d``: half the summed trace-norm distance
between the keyed states and the ideal uniform-key average, equal to half
the trace-norm distance between the joint key-probe operator and the
product of a uniform key with the averaged probe (``compute_d_joint``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import projector, require_density, trace_norm
from .tolerances import DIST_SUM_TOL, MAX_DIM, PROB_SUM_TOL


class EnsembleEntry(NamedTuple):
    key: str
    prob: float
    state: np.ndarray


@dataclass(frozen=True)
class CqEnsemble:
    """Keyed ensemble {key k, prior p(k), state rho^k}.

    Keys are bitstrings of length ``n_bits``; absent keys carry prior 0.
    Entries are validated on construction and treated as immutable
    afterwards.
    """

    n_bits: int
    entries: tuple[EnsembleEntry, ...]

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be >= 1")
        entries = tuple(
            EnsembleEntry(str(k), float(p), require_density(s, name=f"state for key {k!r}"))
            for k, p, s in self.entries
        )
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("ensemble must have at least one entry")
        if len(entries) > self.num_keys:
            raise ValueError(f"more entries ({len(entries)}) than keys (2^{self.n_bits})")
        seen = set()
        dim = entries[0].state.shape[0]
        total = 0.0
        for key, prob, state in entries:
            if len(key) != self.n_bits or any(c not in "01" for c in key):
                raise ValueError(f"key {key!r} is not a {self.n_bits}-bit string")
            if key in seen:
                raise ValueError(f"duplicate key {key!r}")
            seen.add(key)
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"prior for key {key!r} out of [0, 1]: {prob!r}")
            if state.shape[0] != dim:
                raise ValueError("all states must share one dimension")
            total += prob
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"priors must sum to 1, got {total!r}")

    @property
    def dim(self) -> int:
        return self.entries[0].state.shape[0]

    @property
    def num_keys(self) -> int:
        """Size of the full key space, 2^n_bits."""
        return 1 << self.n_bits

    def prior_vector(self) -> np.ndarray:
        """Priors over the full key space in lexicographic key order."""
        p = np.zeros(self.num_keys)
        for key, prob, _ in self.entries:
            p[int(key, 2)] = prob
        return p


def check_positions(positions: Sequence[int], n_bits: int, name: str = "positions") -> tuple[int, ...]:
    """Validate a strictly increasing, nonempty tuple of bit positions."""
    pos = tuple(int(i) for i in positions)
    if not pos:
        raise ValueError(f"{name} must be nonempty")
    if any(i < 0 or i >= n_bits for i in pos):
        raise ValueError(f"{name} must lie in [0, {n_bits})")
    if any(b <= a for a, b in zip(pos, pos[1:])):
        raise ValueError(f"{name} must be strictly increasing with no duplicates")
    return pos


def require_distribution(probs, tol: float = DIST_SUM_TOL) -> np.ndarray:
    """Validate a classical probability vector."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("distribution must be a nonempty vector")
    if p.min() < 0.0:
        raise ValueError(f"distribution has a negative entry: {p.min()!r}")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"distribution must sum to 1, got {p.sum()!r}")
    return p


def average_state(ens: CqEnsemble) -> np.ndarray:
    """Prior-weighted average of the ensemble states."""
    acc = np.zeros((ens.dim, ens.dim), dtype=complex)
    for _, prob, state in ens.entries:
        acc += prob * state
    return acc


def compute_d(ens: CqEnsemble) -> float:
    """Distance-to-ideal criterion via the per-key sum.

    d = 1/2 sum over all 2^n keys of ||p(k) rho^k - rho_E / N||_1.
    Keys absent from the ensemble carry p(k) = 0 and contribute
    ||rho_E / N||_1 = 1/N each, since rho_E has unit trace.
    """
    n = ens.num_keys
    rho_avg = average_state(ens)
    total = sum(trace_norm(prob * state - rho_avg / n) for _, prob, state in ens.entries)
    total += (n - len(ens.entries)) / n
    return 0.5 * total


def compute_d_joint(ens: CqEnsemble) -> float:
    """Distance-to-ideal criterion via the explicit joint operator.

    Builds the block-diagonal key-probe operator sum_k p(k) |k><k| (x) rho^k
    and the ideal product (I/N) (x) rho_E, and returns half the trace norm
    of their difference. Equal to ``compute_d``; available only while
    N * dim stays within the dimension cap.
    """
    n, dim = ens.num_keys, ens.dim
    joint_dim = n * dim
    if joint_dim > MAX_DIM:
        raise ValueError(
            f"joint dimension {joint_dim} exceeds maximum {MAX_DIM}; use compute_d instead"
        )
    rho_avg = average_state(ens)
    diff = np.kron(np.eye(n) / n, -rho_avg).astype(complex)
    for key, prob, state in ens.entries:
        i = int(key, 2) * dim
        diff[i:i + dim, i:i + dim] += prob * state
    return 0.5 * trace_norm(diff)


# The four single-qubit states used by the locking construction: indices
# 1 and 3 are the computational basis, 2 and 4 the conjugate basis, so
# <1|3> = <2|4> = 0 and every cross pairing has overlap 1/sqrt(2).
BB84_VECTORS = {
    1: np.array([1.0, 0.0], dtype=complex),
    2: np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    3: np.array([0.0, 1.0], dtype=complex),
    4: np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}


def build_locking_example() -> CqEnsemble:
    """Two-bit ensemble whose second bit is locked behind the first.

    Keys are uniform over {00, 01, 10, 11}. The probe is two qubits: the
    first always carries the basis vector indexed 1, the second carries
    one of the four states above, chosen so that knowing the first key bit
    names the basis that reveals the second bit exactly, while no single
    measurement reads both.
    """
    second = {"11": 1, "10": 3, "01": 2, "00": 4}
    first = projector(BB84_VECTORS[1])
    entries = [
        (key, 0.25, np.kron(first, projector(BB84_VECTORS[idx])))
        for key, idx in sorted(second.items())
    ]
    return CqEnsemble(n_bits=2, entries=tuple(entries))


def build_biased_classical(n_bits: int, eps: float) -> np.ndarray:
    """Half-boosted, half-depressed distribution over 2^n outcomes.

    The first half of the outcomes get probability (1+eps)/N, the second
    half (1-eps)/N.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps!r}")
    n = 1 << int(n_bits)
    if n < 2:
        raise ValueError("need at least 1 bit")
    p = np.empty(n)
    p[: n // 2] = (1.0 + eps) / n
    p[n // 2:] = (1.0 - eps) / n
    return p


def build_ideal_ensemble(n_bits: int, dim: int = 2) -> CqEnsemble:
    """Uniform priors, identical (maximally mixed) states: d = 0."""
    n = 1 << int(n_bits)
    state = np.eye(dim, dtype=complex) / dim
    entries = [(format(k, f"0{n_bits}b"), 1.0 / n, state) for k in range(n)]
    return CqEnsemble(n_bits=n_bits, entries=tuple(entries))


def build_biased_ensemble(n_bits: int, eps: float) -> CqEnsemble:
    """Biased priors with trivial (one-dimensional) states.

    With no quantum side information the criterion collapses to the
    classical distance: d = eps / 2.
    """
    probs = build_biased_classical(n_bits, eps)
    state = np.ones((1, 1), dtype=complex)
    entries = [(format(k, f"0{n_bits}b"), float(p), state) for k, p in enumerate(probs)]
    return CqEnsemble(n_bits=n_bits, entries=tuple(entries))


def build_random_ensemble(n_bits: int, dim: int, seed: int, pure: bool = True) -> CqEnsemble:
    """Reproducible pseudo-random ensemble over the full key space.

    Priors come from a symmetric Dirichlet draw. Pure states are normalized
    complex Gaussian vectors; mixed states are trace-normalized Wishart
    matrices G G^dag.
    """
    if dim > 64:
        raise ValueError(f"dim {dim} exceeds random-ensemble maximum 64")
    if n_bits > 8:
        raise ValueError(f"n_bits {n_bits} exceeds random-ensemble maximum 8")
    rng = np.random.default_rng(seed)
    n = 1 << int(n_bits)
    probs = rng.dirichlet(np.ones(n))
    entries = []
    for k in range(n):
        if pure:
            g = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            g /= np.linalg.norm(g)
            state = np.outer(g, g.conj())
        else:
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            state = g @ g.conj().T
            state /= np.trace(state).real
        state = (state + state.conj().T) / 2
        entries.append((format(k, f"0{n_bits}b"), float(probs[k]), state))
    return CqEnsemble(n_bits=n_bits, entries=tuple(entries))


def _reduce_keys(items, positions: tuple[int, ...], n_bits: int) -> list[EnsembleEntry]:
    """Merge (key, prob, state) items whose keys agree on ``positions``.

    The merged state is the probability-weighted mixture of the merged
    states; zero-probability groups are dropped.
    """
    acc: dict[str, tuple[float, np.ndarray]] = {}
    for key, prob, state in items:
        reduced = "".join(key[i] for i in positions)
        if reduced in acc:
            p0, s0 = acc[reduced]
            acc[reduced] = (p0 + prob, s0 + prob * state)
        else:
            acc[reduced] = (prob, prob * state.astype(complex))
    out = []
    for key in sorted(acc):
        prob, weighted = acc[key]
        if prob <= 0.0:
            continue
        out.append(EnsembleEntry(key, prob, weighted / prob))
    return out


def marginalize_subset(ens: CqEnsemble, positions: Sequence[int]) -> CqEnsemble:
    """Restrict the key to a subset of bit positions.

    The reduced prior sums the full priors of every consistent key; the
    reduced state is the corresponding mixture. Keys with zero reduced
    prior are omitted.
    """
    pos = check_positions(positions, ens.n_bits, "subset positions")
    entries = _reduce_keys(ens.entries, pos, ens.n_bits)
    return CqEnsemble(n_bits=len(pos), entries=tuple(entries))


def condition_on_known(ens: CqEnsemble, known: Sequence[int], values: str) -> CqEnsemble:
    """Condition the ensemble on known values at the given bit positions.

    Keys are re-indexed by the complement positions and priors renormalized
    by Bayes. Conditioning away every position would leave nothing to
    estimate and is rejected, as is conditioning on values of zero
    probability.
    """
    known_pos = check_positions(known, ens.n_bits, "known positions")
    if len(values) != len(known_pos) or any(c not in "01" for c in values):
        raise ValueError(f"values {values!r} must be a bitstring of length {len(known_pos)}")
    rest = tuple(i for i in range(ens.n_bits) if i not in known_pos)
    if not rest:
        raise ValueError("conditioning on every position leaves nothing to estimate")
    consistent = [
        e for e in ens.entries
        if all(e.key[i] == v for i, v in zip(known_pos, values))
    ]
    total = sum(e.prob for e in consistent)
    if total <= 0.0:
        raise ValueError(f"known values {values!r} have zero probability")
    scaled = [(e.key, e.prob / total, e.state) for e in consistent]
    entries = _reduce_keys(scaled, rest, ens.n_bits)
    return CqEnsemble(n_bits=len(rest), entries=tuple(entries))


@dataclass(frozen=True)
class PairwiseDistanceReport:
    """Extremes of the weighted state distances, with their guarantees.

    ``max_pairwise`` is the largest ||p(k) rho^k - p(k') rho^k'||_1 over
    distinct key pairs and is bounded by 4d; ``max_singleton`` is the
    largest ||p(k) rho^k - rho_E / N||_1 over keys and is bounded by 2d.
    """

    max_pairwise: float
    pairwise_bound: float
    max_singleton: float
    singleton_bound: float


def pairwise_distance_checks(ens: CqEnsemble) -> PairwiseDistanceReport:
    """Evaluate the pairwise and singleton distance maxima against 4d and 2d.

    Absent keys enter with p(k) = 0: against a present key k' the pair
    distance is p(k'), between two absent keys it is 0, and the singleton
    distance is 1/N.
    """
    d = compute_d(ens)
    n = ens.num_keys
    rho_avg = average_state(ens)
    weighted = [(prob, prob * state) for _, prob, state in ens.entries]
    max_single = max(trace_norm(w - rho_avg / n) for _, w in weighted)
    max_pair = 0.0
    for i, (_, wi) in enumerate(weighted):
        for _, wj in weighted[i + 1:]:
            max_pair = max(max_pair, trace_norm(wi - wj))
    if len(ens.entries) < n:
        max_single = max(max_single, 1.0 / n)
        max_pair = max(max_pair, max(p for p, _ in weighted))
    return PairwiseDistanceReport(
        max_pairwise=max_pair,
        pairwise_bound=4.0 * d,
        max_singleton=max_single,
        singleton_bound=2.0 * d,
    )
