"""Linear constitutive tensors, their observer blocks, adjoints and the Post invariant.

A constitutive tensor ``Z`` maps the field 2-form ``F`` to the excitation
``G = Z(F)``.  Its public matrix uses the 2-form basis order
``(01, 02, 03, 23, 31, 12)`` so that the upper-left 3x3 block couples the
electric parts and the lower-right block the magnetic parts.  Internally
the operator acts on the lexicographic storage of :class:`PForm`.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import least_squares, minimize

from .exterior import (
    COMBOS,
    ETA,
    INDEX,
    PForm,
    _interior_table,
    _wedge_table,
    coframe,
    gram,
    hodge,
    hodge_matrix,
    induced_matrix,
    interior,
    perm_sign,
    wedge,
)
from .fields import Velocity, as_velocity, boost_matrix

Z_BASIS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def _basis_change() -> np.ndarray:
    s = np.zeros((6, 6))
    for k, pair in enumerate(Z_BASIS):
        s[k, INDEX[2][tuple(sorted(pair))]] = perm_sign(pair)
    return s


# z_coords = S @ lex_comps ; S is a signed permutation so S^-1 = S^T
_S = _basis_change()
_S.setflags(write=False)


def operator_from_function(fn, p: int = 2) -> np.ndarray:
    """Matrix of a linear map on p-forms, probed on the basis."""
    cols = []
    for idx in COMBOS[p]:
        cols.append(fn(PForm.basis(*idx)).components)
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class ConstitutiveZ:
    """Linear map on 2-forms, ``matrix`` in the ``Z_BASIS`` order."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (6, 6):
            raise ValueError(f"constitutive matrix must be 6x6, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("constitutive matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_operator(cls, op: np.ndarray) -> "ConstitutiveZ":
        return cls(_S @ np.asarray(op, dtype=float) @ _S.T)

    @classmethod
    def identity(cls) -> "ConstitutiveZ":
        return cls(np.eye(6))

    @cached_property
    def operator(self) -> np.ndarray:
        """Matrix acting on lexicographic 2-form storage."""
        return _S.T @ self.matrix @ _S

    def __call__(self, F: PForm) -> PForm:
        if F.degree != 2:
            raise ValueError("Z acts on 2-forms")
        return PForm(2, self.operator @ F.components)

    def tensor(self) -> np.ndarray:
        """Components ``Z[c, d, a, b] = Z^{cd}_{ab}`` with both pair antisymmetries."""
        out = np.zeros((4, 4, 4, 4))
        op = self.operator
        for i, (a, b) in enumerate(COMBOS[2]):
            for j, (c, d) in enumerate(COMBOS[2]):
                v = op[i, j]
                out[c, d, a, b] = v
                out[d, c, a, b] = -v
                out[c, d, b, a] = -v
                out[d, c, b, a] = v
        return out

    def norm2(self) -> float:
        return float(np.sum(self.matrix ** 2))

    def transformed(self, L: np.ndarray) -> "ConstitutiveZ":
        """Components in the frame whose vector components are ``L`` times the old ones."""
        c2 = induced_matrix(np.linalg.inv(L).T, 2)
        return ConstitutiveZ.from_operator(c2 @ self.operator @ np.linalg.inv(c2))

    @cached_property
    def self_adjoint(self) -> bool:
        return is_self_adjoint(self)[0]


# ---------------------------------------------------------------------------
# adjoints


def adjoint(T: np.ndarray, p: int) -> np.ndarray:
    """Adjoint of a map on p-forms: ``a ^ *T(b) = b ^ *T^dagger(a)``."""
    if not 1 <= p <= 3:
        raise ValueError("adjoint is defined here for degrees 1..3")
    n = gram(p)
    return np.linalg.inv(n) @ np.asarray(T, dtype=float).T @ n


def adjoint_metric(T: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """1-form adjoint with respect to a general metric ``g``: ``i_{g^-1 a} T(b) = i_{g^-1 b} T^dagger(a)``."""
    g = np.asarray(metric, dtype=float)
    return g @ np.asarray(T, dtype=float).T @ np.linalg.inv(g)


def is_self_adjoint(Z: ConstitutiveZ, tol: float = 1e-12) -> tuple[bool, float]:
    op = Z.operator
    violation = float(np.max(np.abs(op - adjoint(op, 2))))
    return violation <= tol * max(1.0, float(np.max(np.abs(op)))), violation


# ---------------------------------------------------------------------------
# observer blocks


@dataclass(frozen=True, eq=False)
class ZetaBlocks:
    """Spatial maps relating comoving ``(d, h)`` to ``(e, b)``; 4x4 matrices on 1-form components."""

    zde: np.ndarray
    zdb: np.ndarray
    zhe: np.ndarray
    zhb: np.ndarray
    V: Velocity

    def __post_init__(self):
        for name in ("zde", "zdb", "zhe", "zhb"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (4, 4):
                raise ValueError(f"{name} must be 4x4")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        object.__setattr__(self, "V", as_velocity(self.V))

    @property
    def blocks(self) -> dict[str, np.ndarray]:
        return {"zde": self.zde, "zdb": self.zdb, "zhe": self.zhe, "zhb": self.zhb}

    def spatial_violation(self) -> float:
        v = self.V.components
        vd = self.V.dual.components
        return max(
            max(float(np.max(np.abs(m @ vd))), float(np.max(np.abs(v @ m))))
            for m in self.blocks.values()
        )

    def adjoint_violation(self) -> float:
        return max(
            float(np.max(np.abs(adjoint(self.zde, 1) - self.zde))),
            float(np.max(np.abs(adjoint(self.zhb, 1) - self.zhb))),
            float(np.max(np.abs(adjoint(self.zdb, 1) + self.zhe))),
        )

    def __call__(self, e: PForm, b: PForm) -> tuple[PForm, PForm]:
        """Comoving ``(d, h)`` for comoving ``(e, b)``."""
        d = self.zde @ e.components + self.zdb @ b.components
        h = self.zhe @ e.components + self.zhb @ b.components
        return PForm(1, d), PForm(1, h)


def projector(V) -> np.ndarray:
    """``pi_V = Id + V~ (x) V`` acting on 1-form components."""
    V = as_velocity(V)
    return np.eye(4) + np.outer(V.dual.components, V.components)


def _interior_matrix(v: np.ndarray, p: int) -> np.ndarray:
    return np.einsum("a,aik->ki", np.asarray(v, dtype=float), _interior_table(p))


def _wedge_dual_matrix(vd: np.ndarray) -> np.ndarray:
    # alpha -> alpha ^ V~ on 1-form components
    return np.einsum("kjl,j->lk", _wedge_table(1, 1), np.asarray(vd, dtype=float))


def _frame_maps(V: Velocity):
    return _interior_matrix(V.components, 2), _wedge_dual_matrix(V.dual.components)


def _zeta_matrices(op: np.ndarray, V: Velocity):
    iv, w = _frame_maps(V)
    h2 = hodge_matrix(2)
    zde = iv @ op @ w
    zdb = -iv @ op @ h2 @ w
    zhe = iv @ h2 @ op @ w
    zhb = -iv @ h2 @ op @ h2 @ w
    return zde, zdb, zhe, zhb


def extract_zeta(Z: ConstitutiveZ, V) -> ZetaBlocks:
    """Blocks of ``Z`` relative to the medium velocity ``V``."""
    V = as_velocity(V)
    return ZetaBlocks(*_zeta_matrices(Z.operator, V), V=V)


def zeta_operator(z: ZetaBlocks) -> np.ndarray:
    """Lexicographic 2-form operator assembled from blocks (no validation)."""
    iv, w = _frame_maps(z.V)
    h2 = hodge_matrix(2)
    return (
        w @ z.zde @ iv
        + w @ z.zdb @ iv @ h2
        - h2 @ w @ z.zhe @ iv
        - h2 @ w @ z.zhb @ iv @ h2
    )


def build_from_zeta(z: ZetaBlocks, tol: float = 1e-12, require_adjoint: bool = True) -> ConstitutiveZ:
    scale = max(1.0, max(float(np.max(np.abs(m))) for m in z.blocks.values()))
    scale *= z.V.components[0] ** 2
    if z.spatial_violation() > tol * scale:
        raise ValueError("zeta blocks are not spatial with respect to V")
    if require_adjoint and z.adjoint_violation() > tol * scale:
        raise ValueError("zeta blocks violate the adjoint relations")
    return ConstitutiveZ.from_operator(zeta_operator(z))


def spatial_map(m3, V) -> np.ndarray:
    """Lift a 3x3 matrix given in the rest frame of ``V`` to a spatial 1-form map."""
    V = as_velocity(V)
    L = boost_matrix(V.rapidity())
    rest = np.zeros((4, 4))
    rest[1:, 1:] = np.asarray(m3, dtype=float)
    Linv_t = np.linalg.inv(L).T
    return Linv_t @ rest @ L.T


def zeta_from_rest(V, zde3, zdb3=None, zhe3=None, zhb3=None) -> ZetaBlocks:
    """Blocks from 3x3 rest-frame matrices; ``zhe`` defaults to ``-zdb^T``."""
    zdb3 = np.zeros((3, 3)) if zdb3 is None else np.asarray(zdb3, dtype=float)
    zhe3 = -zdb3.T if zhe3 is None else zhe3
    zhb3 = np.eye(3) if zhb3 is None else zhb3
    V = as_velocity(V)
    return ZetaBlocks(
        spatial_map(zde3, V), spatial_map(zdb3, V), spatial_map(zhe3, V), spatial_map(zhb3, V), V
    )


# ---------------------------------------------------------------------------
# builders


def build_isotropic(eps: float, mu: float, V) -> ConstitutiveZ:
    """``G = eps i_V F ^ V~ - mu^-1 *(i_V *F ^ V~)``; comoving ``d = eps e``, ``h = b / mu``."""
    if mu == 0:
        raise ValueError("permeability must be non-zero")
    V = as_velocity(V)
    v = V.dual

    def apply(F):
        return eps * wedge(interior(V, F), v) - hodge(wedge(interior(V, hodge(F)), v)) / mu

    return ConstitutiveZ.from_operator(operator_from_function(apply))


def build_anisotropic(eps: np.ndarray, mu_inv: np.ndarray, V, tol: float = 1e-12) -> ConstitutiveZ:
    """Non-magneto-electric medium from spatial, self-adjoint ``eps`` and ``mu^-1`` (4x4 maps)."""
    V = as_velocity(V)
    eps = np.asarray(eps, dtype=float)
    mu_inv = np.asarray(mu_inv, dtype=float)
    vd = V.dual.components
    scale = V.components[0] ** 2
    for name, m in (("eps", eps), ("mu_inv", mu_inv)):
        s = scale * max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m @ vd)) > tol * s or np.max(np.abs(V.components @ m)) > tol * s:
            raise ValueError(f"{name} is not spatial with respect to V")
        if np.max(np.abs(adjoint(m, 1) - m)) > tol * s:
            raise ValueError(f"{name} is not self-adjoint")
    z = ZetaBlocks(eps, np.zeros((4, 4)), np.zeros((4, 4)), mu_inv, V)
    return ConstitutiveZ.from_operator(zeta_operator(z))


def post_example() -> ConstitutiveZ:
    """Self-adjoint tensor with vanishing Post scalar that is still intrinsically magneto-electric.

    ``Z(F) = F_23 e^01 + F_13 e^02 - F_02 e^13 - F_01 e^23``.
    """
    def apply(F):
        return (
            F[2, 3] * PForm.basis(0, 1)
            + F[1, 3] * PForm.basis(0, 2)
            - F[0, 2] * PForm.basis(1, 3)
            - F[0, 1] * PForm.basis(2, 3)
        )

    return ConstitutiveZ.from_operator(operator_from_function(apply))


def random_self_adjoint(rng: np.random.Generator, scale: float = 1.0) -> ConstitutiveZ:
    """Random element of the 21-dimensional self-adjoint family."""
    a = rng.normal(scale=scale, size=(6, 6))
    sym = 0.5 * (a + a.T)
    # self-adjoint <=> gram @ op symmetric
    op = np.linalg.inv(gram(2)) @ sym
    return ConstitutiveZ.from_operator(op)


# ---------------------------------------------------------------------------
# counting


def _tensor_from_vector(x: np.ndarray) -> np.ndarray:
    return x.reshape(4, 4, 4, 4)


def _operator_from_tensor(t: np.ndarray) -> np.ndarray:
    op = np.zeros((6, 6))
    for i, (a, b) in enumerate(COMBOS[2]):
        for j, (c, d) in enumerate(COMBOS[2]):
            op[i, j] = t[c, d, a, b]
    return op


def count_free_components(self_adjoint: bool = True, no_cross_at=None) -> int:
    """Dimension of the space of ``Z^{cd}_{ab}`` satisfying the chosen constraints.

    Always imposes the pair antisymmetries; optionally ``Z^{abcd} = Z^{cdab}``
    and vanishing cross blocks relative to the velocity ``no_cross_at``.
    """
    V = None if no_cross_at is None else as_velocity(no_cross_at)

    def constraints(x):
        t = _tensor_from_vector(x)
        rows = [
            (t + np.transpose(t, (0, 1, 3, 2))).ravel(),
            (t + np.transpose(t, (1, 0, 2, 3))).ravel(),
        ]
        if self_adjoint:
            up = np.einsum("cdef,ea,fb->cdab", t, ETA, ETA)  # Z^{cd ab}
            rows.append((up - np.transpose(up, (2, 3, 0, 1))).ravel())
        if V is not None:
            _, zdb, zhe, _ = _zeta_matrices(_operator_from_tensor(t), V)
            rows.extend([zdb.ravel(), zhe.ravel()])
        return np.concatenate(rows)

    n = 4 ** 4
    mat = np.column_stack([constraints(np.eye(n)[k]) for k in range(n)])
    return n - int(np.linalg.matrix_rank(mat))


# ---------------------------------------------------------------------------
# Post invariant


def post_invariant(Z: ConstitutiveZ) -> float:
    """``chi = i_a i_b *(Z(e^a ^ e^b))`` summed over all ordered pairs."""
    chi = 0.0
    for a, b in itertools.permutations(range(4), 2):
        x = hodge(Z(wedge(coframe(a), coframe(b))))
        chi += interior(np.eye(4)[a], interior(np.eye(4)[b], x)).components[0]
    return float(chi)


# chi from the definition equals POST_ZDB_FACTOR * trace-form of zeta^db
POST_ZDB_FACTOR = 4.0


def post_invariant_zeta(Z: ConstitutiveZ, V) -> float:
    """``chi`` from the magneto-electric block: ``POST_ZDB_FACTOR * i_a zeta^db(e^a)``."""
    zdb = extract_zeta(Z, V).zdb
    return POST_ZDB_FACTOR * float(np.trace(zdb))


# ---------------------------------------------------------------------------
# intrinsic magneto-electric classification


class Verdict(str, enum.Enum):
    INTRINSIC = "INTRINSIC"
    NOT_INTRINSIC = "NOT_INTRINSIC"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class ClassifyOptions:
    grid: int = 3
    span: float = 2.0
    max_iter: int = 500
    tol: float = 1e-10
    seed: int | None = None
    extra_restarts: int = 0
    polish: bool = True


@dataclass(frozen=True)
class Restart:
    start: np.ndarray
    w: np.ndarray
    value: float
    converged: bool


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    best_V: Velocity
    best_w: np.ndarray
    residual: float
    relative_residual: float
    restarts: list[Restart] = field(default_factory=list)

    @property
    def lower_bound(self) -> float:
        """Smallest objective value seen over every restart."""
        return min(r.value for r in self.restarts)


def cross_coupling(op: np.ndarray, w) -> np.ndarray:
    V = Velocity.from_rapidity(w)
    iv, wm = _frame_maps(V)
    return -iv @ op @ hodge_matrix(2) @ wm


def restart_points(opts: ClassifyOptions) -> list[np.ndarray]:
    axis = np.linspace(-opts.span, opts.span, opts.grid)
    pts = [np.array(p) for p in itertools.product(axis, repeat=3)]
    # stable sort by distance: the origin (if present) is restart 0
    pts.sort(key=lambda p: float(np.linalg.norm(p)))
    if opts.extra_restarts:
        rng = np.random.default_rng(opts.seed)
        pts.extend(rng.uniform(-opts.span, opts.span, size=(opts.extra_restarts, 3)))
    return pts


def classify_intrinsic(Z: ConstitutiveZ, opts: ClassifyOptions | None = None) -> Classification:
    """Search medium velocities for one that removes the magneto-electric blocks.

    Minimises ``|zeta^db(V(w))|_F^2`` over rapidity vectors with multistart
    Nelder-Mead; the best start is then polished by least squares on the
    block entries.
    """
    opts = opts or ClassifyOptions()
    ok, violation = is_self_adjoint(Z)
    if not ok:
        raise ValueError(f"classification needs a self-adjoint Z (violation {violation:.3g})")
    op = Z.operator
    scale = Z.norm2()
    if scale == 0.0:
        return Classification(Verdict.NOT_INTRINSIC, Velocity.rest(), np.zeros(3), 0.0, 0.0,
                              [Restart(np.zeros(3), np.zeros(3), 0.0, True)])

    def objective(w):
        return float(np.sum(cross_coupling(op, w) ** 2)) / scale

    restarts = []
    for start in restart_points(opts):
        res = minimize(
            objective, start, method="Nelder-Mead",
            options={"maxiter": opts.max_iter, "xatol": 1e-10, "fatol": 1e-24},
        )
        restarts.append(Restart(np.asarray(start), np.asarray(res.x), float(res.fun), bool(res.success)))

    best_i = min(range(len(restarts)), key=lambda i: (restarts[i].value, i))
    best = restarts[best_i]
    if opts.polish and best.value > 0.0:
        ls = least_squares(lambda w: cross_coupling(op, w).ravel() / np.sqrt(scale), best.w,
                           xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        value = float(2.0 * ls.cost)
        if value < best.value:
            best = Restart(best.start, np.asarray(ls.x), value, best.converged or bool(ls.success))
            restarts[best_i] = best

    rel = best.value
    if rel < opts.tol:
        verdict = Verdict.NOT_INTRINSIC
    elif any(r.converged for r in restarts):
        verdict = Verdict.INTRINSIC
    else:
        verdict = Verdict.UNDECIDED
    return Classification(verdict, Velocity.from_rapidity(best.w), best.w, rel * scale, rel, restarts)
