"""Pointwise exterior algebra on 4-dimensional Minkowski space.

Forms are stored densely in a fixed orthonormal coframe ``e^0..e^3`` with
metric ``eta = diag(-1, 1, 1, 1)``.  A p-form keeps ``C(4, p)`` components
indexed by strictly increasing multi-indices in lexicographic order, so a
2-form is stored as ``(01, 02, 03, 12, 13, 23)``.

Conventions:

* ``vol = e^0 ^ e^1 ^ e^2 ^ e^3`` and ``*1 = vol``.
* The Hodge map is fixed by ``a ^ *b = <a, b> vol`` where ``<, >`` is the
  inner product induced by ``eta`` on p-forms.  With these choices
  ``**a = (-1)**(p + 1) a``.
* ``interior(X, a)`` contracts the first slot, ``i_X e^I = sum_k (-1)**k X^{I_k} e^{I - I_k}``.

Vectors are plain length-4 arrays of contravariant components (anything
accepted by ``numpy.asarray``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
ETA.setflags(write=False)

COMBOS: tuple[tuple[tuple[int, ...], ...], ...] = tuple(
    tuple(itertools.combinations(range(4), p)) for p in range(5)
)
INDEX: tuple[dict[tuple[int, ...], int], ...] = tuple(
    {c: i for i, c in enumerate(COMBOS[p])} for p in range(5)
)


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def dim(p: int) -> int:
    return comb(4, p)


@dataclass(frozen=True, eq=False)
class PForm:
    """A p-form with components on increasing multi-indices.

    ``degenerate`` marks the zero result of a wedge whose degree would
    exceed 4; such a form is stored as a zero 4-form.
    """

    degree: int
    components: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        if not 0 <= self.degree <= 4:
            raise ValueError(f"form degree must be in 0..4, got {self.degree}")
        comps = np.array(self.components, dtype=float).reshape(-1)
        if comps.size != dim(self.degree):
            raise ValueError(
                f"a {self.degree}-form needs {dim(self.degree)} components, got {comps.size}"
            )
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    # construction helpers
    @classmethod
    def zero(cls, degree: int) -> "PForm":
        return cls(degree, np.zeros(dim(degree)))

    @classmethod
    def scalar(cls, value: float) -> "PForm":
        return cls(0, [value])

    @classmethod
    def basis(cls, *indices: int) -> "PForm":
        """``e^{i1} ^ e^{i2} ^ ...`` for indices in any order."""
        p = len(indices)
        comps = np.zeros(dim(p))
        sign = perm_sign(indices)
        if sign:
            comps[INDEX[p][tuple(sorted(indices))]] = sign
        return cls(p, comps)

    @classmethod
    def one_form(cls, comps) -> "PForm":
        return cls(1, comps)

    @classmethod
    def volume(cls) -> "PForm":
        return cls(4, [1.0])

    def __getitem__(self, indices) -> float:
        if not isinstance(indices, tuple):
            indices = (indices,)
        if len(indices) != self.degree:
            raise IndexError(f"expected {self.degree} indices")
        sign = perm_sign(indices)
        if not sign:
            return 0.0
        return sign * float(self.components[INDEX[self.degree][tuple(sorted(indices))]])

    # vector-space structure
    def _check(self, other: "PForm"):
        if not isinstance(other, PForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return PForm(self.degree, self.components + other.components)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return PForm(self.degree, self.components - other.components)

    def __neg__(self):
        return PForm(self.degree, -self.components, self.degenerate)

    def __mul__(self, scale):
        if isinstance(scale, PForm):
            return NotImplemented
        return PForm(self.degree, float(scale) * self.components, self.degenerate)

    __rmul__ = __mul__

    def __truediv__(self, scale):
        return PForm(self.degree, self.components / float(scale), self.degenerate)

    def __xor__(self, other):
        return wedge(self, other)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    def allclose(self, other: "PForm", atol: float = 1e-12) -> bool:
        return self.degree == other.degree and bool(
            np.allclose(self.components, other.components, rtol=0.0, atol=atol)
        )

    def __repr__(self):
        terms = [
            f"{c:+.6g} e^{''.join(map(str, idx))}"
            for c, idx in zip(self.components, COMBOS[self.degree])
            if c != 0.0
        ]
        return f"PForm({self.degree}: {' '.join(terms) or '0'})"


# ---------------------------------------------------------------------------
# structure tensors, built once


@lru_cache(maxsize=None)
def _wedge_table(p: int, q: int) -> np.ndarray:
    table = np.zeros((dim(p), dim(q), dim(p + q)))
    for i, a in enumerate(COMBOS[p]):
        for j, b in enumerate(COMBOS[q]):
            sign = perm_sign(a + b)
            if sign:
                table[i, j, INDEX[p + q][tuple(sorted(a + b))]] = sign
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _interior_table(p: int) -> np.ndarray:
    # table[a, I, J]: coefficient of e^J in i_{X_a} e^I
    table = np.zeros((4, dim(p), dim(p - 1)))
    for i, idx in enumerate(COMBOS[p]):
        for k, a in enumerate(idx):
            rest = idx[:k] + idx[k + 1:]
            table[a, i, INDEX[p - 1][rest]] += (-1) ** k
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def gram(p: int) -> np.ndarray:
    """Diagonal Gram matrix of the eta inner product on p-forms."""
    diag = [np.prod([ETA[a, a] for a in idx]) for idx in COMBOS[p]]
    out = np.diag(np.array(diag, dtype=float))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def hodge_matrix(p: int) -> np.ndarray:
    """Matrix of the Hodge map from p-form to (4-p)-form components."""
    out = np.zeros((dim(4 - p), dim(p)))
    for i, idx in enumerate(COMBOS[p]):
        comp = tuple(a for a in range(4) if a not in idx)
        eta_ii = np.prod([ETA[a, a] for a in idx])
        out[INDEX[4 - p][comp], i] = eta_ii * perm_sign(idx + comp)
    out.setflags(write=False)
    return out


def induced_matrix(m: np.ndarray, p: int) -> np.ndarray:
    """Action on p-form components induced by a linear map ``m`` on 1-form components.

    Entry ``[I, J]`` is the minor ``det m[I, J]`` (Cauchy-Binet).
    """
    m = np.asarray(m, dtype=float)
    if p == 0:
        return np.ones((1, 1))
    out = np.empty((dim(p), dim(p)))
    for i, a in enumerate(COMBOS[p]):
        for j, b in enumerate(COMBOS[p]):
            out[i, j] = np.linalg.det(m[np.ix_(a, b)])
    return out


# ---------------------------------------------------------------------------
# operations


def wedge(a: PForm, b: PForm) -> PForm:
    """Exterior product.

    Degrees summing past 4 give the zero 4-form with ``degenerate=True``.
    """
    p, q = a.degree, b.degree
    if p + q > 4:
        return PForm(4, [0.0], degenerate=True)
    comps = np.einsum("i,j,ijk->k", a.components, b.components, _wedge_table(p, q))
    return PForm(p + q, comps)


def interior(x, a: PForm) -> PForm:
    """Interior contraction ``i_X a``; zero on 0-forms."""
    if a.degree == 0:
        return PForm.zero(0)
    x = np.asarray(x, dtype=float)
    comps = np.einsum("a,i,aik->k", x, a.components, _interior_table(a.degree))
    return PForm(a.degree - 1, comps)


def metric_dual_vec(x, metric: np.ndarray = ETA) -> PForm:
    """``X~ = g(X, -)`` as a 1-form."""
    return PForm(1, np.asarray(metric) @ np.asarray(x, dtype=float))


def metric_dual_form(a: PForm, metric: np.ndarray = ETA) -> np.ndarray:
    """The vector ``g^{-1}(a, -)`` of a 1-form."""
    if a.degree != 1:
        raise ValueError("metric_dual_form needs a 1-form")
    return np.linalg.solve(np.asarray(metric), a.components)


def hodge(a: PForm) -> PForm:
    return PForm(4 - a.degree, hodge_matrix(a.degree) @ a.components)


def hodge_reversed(a: PForm) -> PForm:
    """Alternative convention ``*'a = (-1)**p *a`` (the ``*b ^ a`` ordering).

    Only the self-test uses it, to show the identity suite catches a flip.
    """
    return (-1) ** a.degree * hodge(a)


def inner(a: PForm, b: PForm) -> float:
    if a.degree != b.degree:
        raise ValueError("inner product needs equal degrees")
    return float(a.components @ gram(a.degree) @ b.components)


def coframe(a: int) -> PForm:
    """``e^a``."""
    return PForm.basis(a)


def lowered_coframe(a: int) -> PForm:
    """``e_a = eta_ab e^b``."""
    return ETA[a, a] * PForm.basis(a)


def frame(a: int) -> np.ndarray:
    """Components of the frame vector ``X_a``."""
    out = np.zeros(4)
    out[a] = 1.0
    return out


def levi_civita() -> np.ndarray:
    """``epsilon_{abcd}`` with ``epsilon_{0123} = +1`` (lower indices)."""
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        eps[perm] = perm_sign(perm)
    return eps


def epsilon_from_hodge() -> np.ndarray:
    """Lower-index volume symbol read off the implementation.

    ``epsilon_{abcd}`` is the coefficient of ``e^a ^ e^b ^ e^c ^ e^d`` relative
    to ``*1``, so it follows whatever orientation the Hodge map carries.
    """
    vol = hodge(PForm.scalar(1.0))
    eps = np.zeros((4, 4, 4, 4))
    for idx in itertools.product(range(4), repeat=4):
        w = wedge(wedge(coframe(idx[0]), coframe(idx[1])), wedge(coframe(idx[2]), coframe(idx[3])))
        eps[idx] = w.components[0] / vol.components[0]
    return eps


def epsilon_contract() -> np.ndarray:
    """``C[e, f, c, d] = epsilon_{abef} epsilon^{abcd}`` summed over a, b."""
    eps_lo = epsilon_from_hodge()
    eps_up = np.einsum("abcd,aw,bx,cy,dz->wxyz", eps_lo, ETA, ETA, ETA, ETA)
    return np.einsum("abef,abcd->efcd", eps_lo, eps_up)


def epsilon_contraction_constant() -> float:
    """Constant k with ``epsilon_{abef} epsilon^{abcd} = k (d^d_e d^c_f - d^c_e d^d_f)``.

    Evaluates to 2 here: the sum over ordered pairs (a, b) counts each
    complementary pair twice, and the Lorentzian sign is already absorbed by
    the index ordering on the right.
    """
    c = epsilon_contract()
    delta = np.eye(4)
    shape = np.einsum("de,cf->efcd", delta, delta) - np.einsum("ce,df->efcd", delta, delta)
    return float(np.sum(c * shape) / np.sum(shape * shape))
