"""Measurements that distinguish ensemble states, optimal and heuristic.

Provides the binary optimum, the exact maximum-a-posteriori rule for
commuting (classical) ensembles, the square-root measurement, and a
fixed-point solver for the general minimum-error measurement with an
optimality certificate. Every measurement can be evaluated for sequence
success and per-bit error rates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ensemble import CqEnsemble, average_state, marginalize_subset
from .linalg import (
    all_commute,
    common_eigenbasis,
    hermitize,
    require_hermitian,
    trace_norm,
)
from .tolerances import (
    COMMUTE_TOL,
    COMPLETENESS_TOL,
    PSD_TOL,
    SOLVER_MAX_ITER,
    SOLVER_TOL,
)


class PovmElement(NamedTuple):
    operator: np.ndarray
    guess: str


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to identity, each tagged with a key guess."""

    elements: tuple[PovmElement, ...]

    def __post_init__(self):
        elements = tuple(
            PovmElement(np.asarray(op, dtype=complex), str(guess))
            for op, guess in self.elements
        )
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ValueError("POVM must have at least one element")

    @property
    def dim(self) -> int:
        return self.elements[0].operator.shape[0]

    def validate(self, psd_tol: float = PSD_TOL, completeness_tol: float = COMPLETENESS_TOL):
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for i, (op, _) in enumerate(self.elements):
            op = require_hermitian(op, name=f"POVM element {i}")
            low = float(np.linalg.eigvalsh(op)[0])
            if low < -psd_tol:
                raise ValueError(f"POVM element {i} has negative eigenvalue {low:.3e}")
            total += op
        defect = float(np.abs(total - np.eye(self.dim)).max())
        if defect > completeness_tol:
            raise ValueError(f"POVM elements sum to identity only within {defect:.3e}")
        return self


@dataclass(frozen=True)
class AttackResult:
    """Outcome of one attack: sequence success, per-bit errors, certificate.

    ``ber`` is always the mean of ``per_bit_error``. ``certificate_residual``
    is present for solver results (0 certifies optimality);
    ``converged`` records whether the solver met its target.
    """

    success_prob: float
    per_bit_error: tuple[float, ...]
    ber: float
    method: str
    certificate_residual: float | None = None
    converged: bool | None = None
    povm: Povm | None = None


def _positive_entries(ens: CqEnsemble):
    return [e for e in ens.entries if e.prob > 0.0]


def evaluate_measurement(ens: CqEnsemble, povm: Povm, method: str = "custom",
                         certificate_residual: float | None = None,
                         converged: bool | None = None) -> AttackResult:
    """Exact sequence success and per-bit error rates of a measurement.

    Success counts an outcome as correct when its guess equals the key;
    per-bit error i accumulates the probability that the guessed bit i
    differs from the key's bit i.
    """
    if povm.dim != ens.dim:
        raise ValueError(f"POVM dimension {povm.dim} does not match ensemble dimension {ens.dim}")
    for _, guess in povm.elements:
        if len(guess) != ens.n_bits or any(c not in "01" for c in guess):
            raise ValueError(f"POVM guess {guess!r} is not a {ens.n_bits}-bit key")
    success = 0.0
    errors = np.zeros(ens.n_bits)
    for key, prob, state in ens.entries:
        for op, guess in povm.elements:
            w = prob * float(np.trace(state @ op).real)
            if guess == key:
                success += w
            for i in range(ens.n_bits):
                if guess[i] != key[i]:
                    errors[i] += w
    per_bit = tuple(float(e) for e in errors)
    return AttackResult(
        success_prob=float(success),
        per_bit_error=per_bit,
        ber=float(np.mean(per_bit)),
        method=method,
        certificate_residual=certificate_residual,
        converged=converged,
        povm=povm,
    )


def helstrom_binary(p0: float, rho0, p1: float, rho1) -> tuple[float, Povm]:
    """Optimal binary discrimination success and the projective measurement.

    Success is (1 + ||p0 rho0 - p1 rho1||_1) / 2, achieved by projecting
    onto the nonnegative eigenspace of p0 rho0 - p1 rho1 for hypothesis 0
    (ties go to 0) and its complement for hypothesis 1.
    """
    if abs(p0 + p1 - 1.0) > 1e-10:
        raise ValueError(f"priors must sum to 1, got {p0 + p1!r}")
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    if rho0.shape != rho1.shape:
        raise ValueError(f"state dimensions differ: {rho0.shape} vs {rho1.shape}")
    delta = require_hermitian(p0 * rho0 - p1 * rho1, name="decision operator")
    w, v = np.linalg.eigh(delta)
    keep = w >= 0.0
    pi0 = hermitize(v[:, keep] @ v[:, keep].conj().T) if keep.any() else np.zeros_like(delta)
    pi1 = np.eye(delta.shape[0], dtype=complex) - pi0
    success = 0.5 * (1.0 + float(np.abs(w).sum()))
    return success, Povm(elements=(PovmElement(pi0, "0"), PovmElement(pi1, "1")))


def map_success_classical(ens: CqEnsemble, tol: float = COMMUTE_TOL) -> AttackResult:
    """Exact optimum for a commuting ensemble via the shared eigenbasis.

    Measures in the common eigenbasis and guesses the key maximizing
    p(k) <y|rho^k|y> for each outcome y, ties to the lexicographically
    smallest key. Rejects ensembles whose states do not commute.
    """
    states = [e.state for e in ens.entries]
    if not all_commute(states, tol=tol):
        raise ValueError("ensemble states do not commute; use the iterative solver instead")
    basis = common_eigenbasis(states, gap_tol=tol)
    candidates = sorted(_positive_entries(ens), key=lambda e: e.key)
    elements = []
    for y in range(ens.dim):
        vec = basis[:, y]
        best_key, best_q = None, -1.0
        for key, prob, state in candidates:
            q = prob * float((vec.conj() @ state @ vec).real)
            if q > best_q:
                best_key, best_q = key, q
        elements.append(PovmElement(np.outer(vec, vec.conj()), best_key))
    povm = Povm(elements=tuple(elements))
    result = evaluate_measurement(ens, povm, method="map")
    return result


def _inv_sqrt_psd(m: np.ndarray, rel_cutoff: float = 1e-13) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix on its support."""
    w, v = np.linalg.eigh(hermitize(m))
    cutoff = max(w[-1], 0.0) * rel_cutoff
    inv = np.where(w > cutoff, 1.0 / np.sqrt(np.where(w > cutoff, w, 1.0)), 0.0)
    return (v * inv) @ v.conj().T


def _fold_remainder(ops: list[np.ndarray], guesses: list[str]) -> Povm:
    """Complete a sub-normalized POVM by adding I - sum to the lex-smallest guess."""
    dim = ops[0].shape[0]
    remainder = np.eye(dim, dtype=complex) - sum(ops)
    target = min(range(len(guesses)), key=lambda i: guesses[i])
    ops = [hermitize(op) for op in ops]
    ops[target] = hermitize(ops[target] + remainder)
    return Povm(elements=tuple(PovmElement(op, g) for op, g in zip(ops, guesses)))


def pretty_good_measurement(ens: CqEnsemble) -> AttackResult:
    """Square-root measurement: rho_E^{-1/2} p(k) rho^k rho_E^{-1/2}.

    The inverse square root is taken on the support of the average state;
    the completion of the kernel is assigned to the lexicographically
    smallest key.
    """
    entries = _positive_entries(ens)
    inv_sqrt = _inv_sqrt_psd(average_state(ens))
    ops = [inv_sqrt @ (prob * state) @ inv_sqrt for _, prob, state in entries]
    povm = _fold_remainder(ops, [e.key for e in entries])
    return evaluate_measurement(ens, povm, method="pgm")


def _group_by_guess(ens: CqEnsemble, povm: Povm) -> dict[str, np.ndarray]:
    grouped: dict[str, np.ndarray] = {}
    for op, guess in povm.elements:
        grouped[guess] = grouped.get(guess, 0) + op
    return grouped


def ykl_residual(ens: CqEnsemble, povm: Povm) -> float:
    """Distance of a measurement from the optimality conditions.

    With Y = sum_k p(k) rho^k Pi_k, an optimal measurement makes Y
    Hermitian with Y - p(k) rho^k >= 0 for every key. The residual adds
    the worst negative-eigenvalue magnitude over keys to the Hermiticity
    defect of Y; it is zero exactly at an optimal measurement.
    """
    grouped = _group_by_guess(ens, povm)
    dim = ens.dim
    y = np.zeros((dim, dim), dtype=complex)
    for key, prob, state in ens.entries:
        pi = grouped.get(key)
        if pi is not None and prob > 0.0:
            y += prob * (state @ pi)
    defect = float(np.abs(y - y.conj().T).max())
    y_h = hermitize(y)
    worst = 0.0
    for key, prob, state in _positive_entries(ens):
        low = float(np.linalg.eigvalsh(y_h - prob * state)[0])
        worst = max(worst, -low)
    return worst + defect


def _blind_guess_povm(ens: CqEnsemble) -> Povm:
    """Identity assigned to the most likely key (lex-smallest on ties)."""
    entries = sorted(_positive_entries(ens), key=lambda e: e.key)
    best = max(entries, key=lambda e: e.prob)  # first max is lex-smallest
    return Povm(elements=(PovmElement(np.eye(ens.dim, dtype=complex), best.key),))


def optimal_povm(ens: CqEnsemble, tol: float = SOLVER_TOL,
                 max_iter: int = SOLVER_MAX_ITER) -> AttackResult:
    """Minimum-error measurement by certified fixed-point iteration.

    Starting from the square-root measurement, repeats the update
    Pi_k <- L^{-1/2} G_k Pi_k G_k L^{-1/2} with G_k = p(k) rho^k and
    L = sum_j G_j Pi_j G_j, folding any completion defect into the
    lex-smallest key. Steps that would lower the success probability by
    more than 1e-12 are damped toward the current iterate and the solver
    stalls out rather than accept a regression; a final comparison against
    blind prior guessing guarantees the result is never worse than the
    trivial attack. Iteration stops once the optimality residual reaches
    ``tol``; otherwise the last iterate is returned flagged unconverged.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    entries = sorted(_positive_entries(ens), key=lambda e: e.key)
    weighted = [prob * state for _, prob, state in entries]
    guesses = [e.key for e in entries]

    seed = pretty_good_measurement(ens)
    grouped = _group_by_guess(ens, seed.povm)
    ops = [grouped[g] for g in guesses]
    povm = _fold_remainder(ops, guesses)
    success = evaluate_measurement(ens, povm, method="iterative").success_prob

    residual = ykl_residual(ens, povm)
    for _ in range(max_iter):
        if residual <= tol:
            break
        grouped = _group_by_guess(ens, povm)
        f_ops = [g @ grouped[key] @ g for g, key in zip(weighted, guesses)]
        l_inv_sqrt = _inv_sqrt_psd(sum(f_ops))
        new_ops = [l_inv_sqrt @ f @ l_inv_sqrt for f in f_ops]
        candidate = _fold_remainder(new_ops, guesses)
        cand_success = evaluate_measurement(ens, candidate, method="iterative").success_prob
        if cand_success < success - 1e-12:
            # Damp the step until it stops regressing; stall if it never does.
            accepted = None
            for alpha in (0.5, 0.25, 0.125):
                mixed_ops = [
                    (1 - alpha) * grouped[key] + alpha * op
                    for key, op in zip(guesses, new_ops)
                ]
                mixed = _fold_remainder(mixed_ops, guesses)
                mixed_success = evaluate_measurement(ens, mixed, method="iterative").success_prob
                if mixed_success >= success - 1e-12:
                    accepted = (mixed, mixed_success)
                    break
            if accepted is None:
                break
            povm, success = accepted
        else:
            povm, success = candidate, cand_success
        residual = ykl_residual(ens, povm)

    blind = evaluate_measurement(ens, _blind_guess_povm(ens), method="iterative")
    if blind.success_prob > success:
        povm, success = blind.povm, blind.success_prob
        residual = ykl_residual(ens, povm)

    return evaluate_measurement(
        ens, povm, method="iterative",
        certificate_residual=residual, converged=bool(residual <= tol),
    )


def per_bit_optimal_ber(ens: CqEnsemble) -> list[float]:
    """Best achievable per-bit success probabilities.

    Marginalizes the ensemble to each single bit position and applies the
    binary optimum; a bit whose value is already certain scores 1.
    """
    successes = []
    for i in range(ens.n_bits):
        marg = marginalize_subset(ens, [i])
        if len(marg.entries) == 1:
            successes.append(1.0)
            continue
        (k0, p0, s0), (k1, p1, s1) = sorted(marg.entries, key=lambda e: e.key)
        success, _ = helstrom_binary(p0, s0, p1, s1)
        successes.append(success)
    return successes
