"""Shared random generators for the test suite. Everything is seeded."""

import numpy as np

from cqsec import CqEnsemble
from cqsec.discrimination import Povm, PovmElement


def random_hermitian(rng, dim, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (g + g.conj().T) / 2


def random_density(rng, dim, pure=False):
    if pure:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
    else:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_unitary(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm(rng, dim, n_outcomes, n_bits):
    """Random full-rank POVM with uniformly drawn key guesses."""
    raw = []
    for _ in range(n_outcomes):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        raw.append(g @ g.conj().T)
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    elements = []
    for op in raw:
        clean = inv_sqrt @ op @ inv_sqrt
        clean = (clean + clean.conj().T) / 2
        guess = format(rng.integers(0, 1 << n_bits), f"0{n_bits}b")
        elements.append(PovmElement(clean, guess))
    return Povm(elements=tuple(elements))


def random_commuting_ensemble(rng, n_bits, dim):
    """States diagonal in one shared random basis; Dirichlet priors."""
    basis = random_unitary(rng, dim)
    n = 1 << n_bits
    probs = rng.dirichlet(np.ones(n))
    entries = []
    for k in range(n):
        lam = rng.dirichlet(np.ones(dim))
        state = (basis * lam) @ basis.conj().T
        entries.append((format(k, f"0{n_bits}b"), float(probs[k]), (state + state.conj().T) / 2))
    return CqEnsemble(n_bits=n_bits, entries=tuple(entries))


def bloch_angle_oracle(p0, rho0, p1, rho1):
    """Brute-force qubit binary discrimination: 180-point grids over the
    Bloch angles, the best point refined coordinate-wise by golden-section.
    Independent of the spectral route used by helstrom_binary."""

    def expect(rho, c, s, phase):
        # <v|rho|v> for v = (cos(t/2), e^{i phi} sin(t/2)), vectorized
        return (c**2 * rho[0, 0].real + s**2 * rho[1, 1].real
                + 2 * c * s * (phase * rho[0, 1]).real)

    def success(theta, phi):
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        phase = np.exp(1j * phi)
        e0, e1 = expect(rho0, c, s, phase), expect(rho1, c, s, phase)
        keep0 = p0 * e0 + p1 * (1.0 - e1)
        keep1 = p1 * e1 + p0 * (1.0 - e0)
        return np.maximum(keep0, keep1)

    thetas = np.linspace(0.0, np.pi, 180)
    phis = np.linspace(0.0, 2 * np.pi, 180, endpoint=False)
    grid_t, grid_p = np.meshgrid(thetas, phis, indexing="ij")
    values = success(grid_t, grid_p)
    flat = int(values.argmax())
    best = (float(grid_t.ravel()[flat]), float(grid_p.ravel()[flat]))
    best_val = float(values.ravel()[flat])

    def golden_max(f, lo, hi, iters=60):
        inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(iters):
            if fc > fd:
                b, d, fd = d, c, fc
                c = b - inv_phi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + inv_phi * (b - a)
                fd = f(d)
        return (a + b) / 2

    th, ph = best
    dt, dp = np.pi / 179, 2 * np.pi / 180
    for _ in range(3):
        th = golden_max(lambda t: success(t, ph), th - dt, th + dt)
        ph = golden_max(lambda p: success(th, p), ph - dp, ph + dp)
    return max(best_val, success(th, ph), max(p0, p1))
