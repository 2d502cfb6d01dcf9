"""Reference values for tests/oracles.rs, computed with an off-the-shelf SDP solver.

Run: python3 oracle_gen.py
"""
import itertools

import cvxpy as cp
import numpy as np


def proj(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def pguess(ops):
    d = ops[0].shape[0]
    ms = [cp.Variable((d, d), hermitian=True) for _ in ops]
    obj = sum(cp.real(cp.trace(e @ m)) for e, m in zip(ops, ms))
    cons = [m >> 0 for m in ms] + [sum(ms) == np.eye(d)]
    cp.Problem(cp.Maximize(obj), cons).solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return obj.value


def p_prior(xs, ys):
    px = sum(np.trace(e).real for e in xs)
    py = sum(np.trace(e).real for e in ys)
    return px * pguess([e / px for e in xs]) + py * pguess([e / py for e in ys])


def p_post(xs, ys):
    return pguess([ex + ey for ex, ey in itertools.product(xs, ys)])


def robustness(a, b):
    """Largest λ with ((1−λ)U + λA, (1−λ)U + λB) jointly measurable."""
    d = a[0].shape[0]
    lam = cp.Variable()
    ms = {(i, j): cp.Variable((d, d), hermitian=True) for i in range(len(a)) for j in range(len(b))}
    cons = [m >> 0 for m in ms.values()]
    for i, ai in enumerate(a):
        cons.append(sum(ms[i, j] for j in range(len(b))) == lam * ai + (1 - lam) * np.eye(d) / len(a))
    for j, bj in enumerate(b):
        cons.append(sum(ms[i, j] for i in range(len(a))) == lam * bj + (1 - lam) * np.eye(d) / len(b))
    cp.Problem(cp.Maximize(lam), cons).solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return lam.value


def fourier(d):
    w = np.exp(2j * np.pi / d)
    phi = [np.eye(d)[h] for h in range(d)]
    psi = [np.array([w ** (h * k) for h in range(d)]) / np.sqrt(d) for k in range(d)]
    return phi, psi


def xi(d, mu):
    phi, psi = fourier(d)
    mk = lambda v, m: (m * proj(v) + (1 - m) * np.eye(d) / d) / (2 * d)
    return [mk(v, mu[0]) for v in phi], [mk(v, mu[1]) for v in psi]


def report(name, xs, ys):
    print(f"{name}: p_prior = {p_prior(xs, ys):.12f}, p_post = {p_post(xs, ys):.12f}")


s = 1 / np.sqrt(2)
ens_a = (
    [0.3 * proj([1, 0]), 0.2 * proj([s, s])],
    [0.25 * proj([s, 1j * s]), 0.25 * (0.7 * proj([0, 1]) + 0.3 * np.eye(2) / 2)],
)
ens_b = (
    [0.2 * proj([1, 0, 0]), 0.15 * proj([1, 1, 1]), 0.15 * proj([1, 1j, 0])],
    [0.3 * proj([0, 1, -1]), 0.2 * np.eye(3) / 3],
)
report("A", *ens_a)
report("B", *ens_b)
for d, mu in [(3, (0.4, 0.3)), (4, (-0.2, 0.5)), (3, (-0.3, -0.4)), (5, (1.0, -0.25))]:
    report(f"xi d={d} mu={mu}", *xi(d, mu))

z = [proj([1, 0]), proj([0, 1])]
t = np.pi / 3
n = [proj([np.cos(t / 2), np.sin(t / 2)]), proj([-np.sin(t / 2), np.cos(t / 2)])]
print(f"qubit 60deg: {robustness(z, n):.12f}  closed form {1 / (np.cos(t / 2) + np.sin(t / 2)):.12f}")
trine = [2 / 3 * proj([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3)]) for k in range(3)]
x = [proj([s, s]), proj([s, -s])]
print(f"trine vs x: {robustness(trine, x):.12f}")
