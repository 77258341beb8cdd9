"""Independent reference implementations on full antisymmetric arrays.

Nothing here touches the package's structure tables: forms are expanded to
rank-p arrays and every operation is a plain sum over permutations.
"""
import itertools
import math

import numpy as np

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def sign(perm):
    perm = list(perm)
    s = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
            elif perm[i] == perm[j]:
                return 0
    return s


def combos(p):
    return list(itertools.combinations(range(4), p))


def levi_civita():
    eps = np.zeros((4,) * 4)
    for perm in itertools.permutations(range(4)):
        eps[perm] = sign(perm)
    return eps


def to_full(p, comps):
    if p == 0:
        return np.array(float(comps[0]))
    out = np.zeros((4,) * p)
    for c, idx in zip(comps, combos(p)):
        for perm in itertools.permutations(range(p)):
            out[tuple(idx[k] for k in perm)] = sign(perm) * c
    return out


def from_full(p, arr):
    if p == 0:
        return np.array([float(arr)])
    return np.array([arr[idx] for idx in combos(p)])


def wedge(p, a, q, b):
    """Components of a ^ b by antisymmetrising the tensor product."""
    if p + q > 4:
        return None
    A, B = to_full(p, a), to_full(q, b)
    prod = np.multiply.outer(A, B)
    n = p + q
    out = np.zeros_like(prod) if n else prod
    if n:
        for perm in itertools.permutations(range(n)):
            out = out + sign(perm) * np.transpose(prod, perm)
    out = out / (math.factorial(p) * math.factorial(q))
    return from_full(n, out)


def interior(x, p, a):
    if p == 0:
        return np.array([0.0])
    A = to_full(p, a)
    return from_full(p - 1, np.tensordot(np.asarray(x, float), A, axes=(0, 0)))


def hodge(p, a):
    """``(*a)_J = a^I eps_{IJ} / p!`` with ``eps_{0123} = +1``."""
    A = to_full(p, a)
    for k in range(p):
        A = np.moveaxis(np.tensordot(ETA, A, axes=(1, k)), 0, k)
    eps = levi_civita()
    out = np.tensordot(A, eps, axes=(list(range(p)), list(range(p)))) if p else A * eps
    return from_full(4 - p, out / math.factorial(p))


def inner(p, a, b):
    A, B = to_full(p, a), to_full(p, b)
    for k in range(p):
        A = np.moveaxis(np.tensordot(ETA, A, axes=(1, k)), 0, k)
    return float(np.sum(A * B)) / math.factorial(p)


def abraham_components(E, D, H, B):
    """Comoving tensor lines built directly from 3-vectors.

    Returns (T00, T0k with the E x H orientation, T_ij).
    """
    E, D, H, B = (np.asarray(v, float) for v in (E, D, H, B))
    w = 0.5 * (E @ D + H @ B)
    Tij = -0.5 * (np.outer(E, D) + np.outer(D, E) + np.outer(H, B) + np.outer(B, H)) + w * np.eye(3)
    return w, np.cross(E, H), Tij
