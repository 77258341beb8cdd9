"""One-parameter coframe variations and the variational drive forms.

A variation is ``e^a_t = e^a + t edot^a`` with ``edot^a = E[a, b] e^b``.  All
forms stay expressed in the fixed coframe ``e^a``; the metric
``g_t = eta_ab e^a_t (x) e^b_t`` has component matrix ``A^T eta A`` with
``A = I + t E``.  The field strength ``F`` is held fixed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exterior import ETA, PForm, coframe, frame, hodge, hodge_matrix, induced_matrix, interior, wedge
from .fields import Velocity, as_velocity
from .media import ConstitutiveZ, ZetaBlocks, extract_zeta
from .sem import DriveForms, SemTensor, abraham_drive

FD_STEP = 1e-5


class DegenerateMetric(ValueError):
    """Raised when ``g_t`` stops being a Lorentzian metric with the original orientation."""


@dataclass(frozen=True, eq=False)
class CoframeVariation:
    """``edot^a = E[a, b] e^b``."""

    E: np.ndarray

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        if E.shape != (4, 4) or not np.all(np.isfinite(E)):
            raise ValueError("coframe variation needs a finite 4x4 matrix")
        E.setflags(write=False)
        object.__setattr__(self, "E", E)

    @classmethod
    def from_forms(cls, edot) -> "CoframeVariation":
        edot = list(edot)
        if len(edot) != 4 or any(f.degree != 1 for f in edot):
            raise ValueError("need four 1-forms")
        return cls(np.array([f.components for f in edot]))

    @classmethod
    def basis(cls, a: int, b: int, scale: float = 1.0) -> "CoframeVariation":
        """``edot^a = scale e^b``, all other ``edot`` zero."""
        E = np.zeros((4, 4))
        E[a, b] = scale
        return cls(E)

    @property
    def edot(self) -> tuple[PForm, ...]:
        return tuple(PForm(1, row) for row in self.E)

    @cached_property
    def gdot(self) -> np.ndarray:
        """``gdot_ab = i_b edot_a + i_a edot_b``."""
        m = ETA @ self.E
        return m + m.T

    def at(self, t: float) -> "LiftedState":
        return LiftedState(self, t)


def _inertia(g: np.ndarray) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(g)
    return int(np.sum(ev < 0)), int(np.sum(ev > 0))


class LiftedState:
    """Metric-derived quantities along the curve ``g_t`` for a fixed medium velocity ``V_0``."""

    def __init__(self, var: CoframeVariation, t: float, V0=None):
        self.var = var
        self.t = float(t)
        A = np.eye(4) + self.t * var.E
        det = np.linalg.det(A)
        g = A.T @ ETA @ A
        if not det > 0 or _inertia(g) != (1, 3):
            raise DegenerateMetric(f"g_t is not Lorentzian at t = {self.t!r}")
        self.A = A
        self.g = g
        self.g_inv = np.linalg.inv(g)
        self._A_inv_t = np.linalg.inv(A).T
        self.V0 = None if V0 is None else as_velocity(V0)

    def with_velocity(self, V0) -> "LiftedState":
        return LiftedState(self.var, self.t, V0)

    def hodge_matrix(self, p: int) -> np.ndarray:
        # pull back to the t-orthonormal coframe, apply the standard map, push forward
        return induced_matrix(self.A.T, 4 - p) @ hodge_matrix(p) @ induced_matrix(self._A_inv_t, p)

    def hodge(self, a: PForm) -> PForm:
        return PForm(4 - a.degree, self.hodge_matrix(a.degree) @ a.components)

    # velocity lift
    def _need_velocity(self):
        if self.V0 is None:
            raise ValueError("state has no medium velocity")

    @cached_property
    def V(self) -> np.ndarray:
        """``V_t = V_0 / sqrt(-g_t(V_0, V_0))``."""
        self._need_velocity()
        v0 = self.V0.components
        norm = v0 @ self.g @ v0
        if not norm < 0:
            raise DegenerateMetric(f"V_0 is not timelike for g_t at t = {self.t!r}")
        return v0 / np.sqrt(-norm)

    @cached_property
    def V_dual(self) -> np.ndarray:
        return self.g @ self.V

    @cached_property
    def projector(self) -> np.ndarray:
        """``pi_t = Id + V~_t (x) V_t`` on 1-form components."""
        return np.eye(4) + np.outer(self.V_dual, self.V)


def hodge_t(state: LiftedState, a: PForm) -> PForm:
    return state.hodge(a)


def hodge_dot(var: CoframeVariation, a: PForm) -> PForm:
    """``edot^a ^ i_a *alpha - *(edot^a ^ i_a alpha)``."""
    sa = hodge(a)
    first = PForm.zero(4 - a.degree)
    second = PForm.zero(a.degree)
    for k, ed in enumerate(var.edot):
        xk = frame(k)
        if a.degree < 4:
            first = first + wedge(ed, interior(xk, sa))
        if a.degree > 0:
            second = second + wedge(ed, interior(xk, a))
    return first - hodge(second)


def hodge_dot_fd(var: CoframeVariation, a: PForm, h: float = FD_STEP) -> PForm:
    return (var.at(h).hodge(a) - var.at(-h).hodge(a)) / (2.0 * h)


def gdot_fd(var: CoframeVariation, h: float = FD_STEP) -> np.ndarray:
    return (var.at(h).g - var.at(-h).g) / (2.0 * h)


def velocity_rate(var: CoframeVariation, V) -> float:
    """``lambda = edot^a(V) V_a`` with ``Vdot = lambda V``."""
    V = as_velocity(V)
    return float((var.E @ V.components) @ V.lowered)


def velocity_dot_fd(var: CoframeVariation, V, h: float = FD_STEP) -> np.ndarray:
    return (var.at(h).with_velocity(V).V - var.at(-h).with_velocity(V).V) / (2.0 * h)


# ---------------------------------------------------------------------------
# zeta lift


def zeta_lift(z: ZetaBlocks, state: LiftedState) -> ZetaBlocks:
    """Blocks at ``t`` from those at ``t = 0``.

    In matrix form ``M_t = (M_0 P + s g P^T M_0'^T g^-1) / 2`` where ``P`` is
    the lifted projector, ``M_0'`` the partner block (``de``/``hb`` pair with
    themselves, ``db`` with ``he``) and ``s`` is ``+1`` for the diagonal blocks
    and ``-1`` for the cross blocks.
    """
    if state.V0 is None:
        state = state.with_velocity(z.V)
    P, g, gi = state.projector, state.g, state.g_inv

    def lift(m, partner, sign):
        return 0.5 * (m @ P + sign * g @ P.T @ partner.T @ gi)

    out = {
        "zde": lift(z.zde, z.zde, 1.0),
        "zhb": lift(z.zhb, z.zhb, 1.0),
        "zdb": lift(z.zdb, z.zhe, -1.0),
        "zhe": lift(z.zhe, z.zdb, -1.0),
    }
    return _LiftedBlocks(state, **out)


@dataclass(frozen=True, eq=False)
class _LiftedBlocks:
    state: LiftedState
    zde: np.ndarray
    zdb: np.ndarray
    zhe: np.ndarray
    zhb: np.ndarray

    @property
    def blocks(self) -> dict[str, np.ndarray]:
        return {"zde": self.zde, "zdb": self.zdb, "zhe": self.zhe, "zhb": self.zhb}


def lift_condition_violations(z0: ZetaBlocks, lifted, state: LiftedState) -> dict[str, float]:
    """Max-abs violation of each lift condition at the state's ``t``.

    ``initial`` compares with ``z0`` and is only meaningful at ``t = 0``.
    """
    v, vd, g, gi = state.V, state.V_dual, state.g, state.g_inv
    spatial = max(
        max(float(np.max(np.abs(m @ vd))), float(np.max(np.abs(v @ m))))
        for m in lifted.blocks.values()
    )

    def adj(m):
        # adjoint of a 1-form map w.r.t. g_t: i_{g^-1 a} T(b) = i_{g^-1 b} T^+(a)
        return g @ m.T @ gi

    adjoint = max(
        float(np.max(np.abs(adj(lifted.zde) - lifted.zde))),
        float(np.max(np.abs(adj(lifted.zhb) - lifted.zhb))),
        float(np.max(np.abs(adj(lifted.zdb) + lifted.zhe))),
    )
    initial = max(
        float(np.max(np.abs(lifted.blocks[k] - z0.blocks[k]))) for k in z0.blocks
    )
    return {"initial": initial, "spatial": spatial, "adjoint": adjoint}


# ---------------------------------------------------------------------------
# action density


def _lagrangian(state: LiftedState, blocks, F: PForm) -> PForm:
    v, vd = state.V, PForm(1, state.V_dual)
    e = interior(v, F)
    b = interior(v, state.hodge(F))
    d = PForm(1, blocks.zde @ e.components + blocks.zdb @ b.components)
    h_e = PForm(1, blocks.zhe @ e.components)
    h_b = PForm(1, blocks.zhb @ b.components)
    two = wedge(F, state.hodge(wedge(d, vd)))
    two = two + wedge(F, wedge(h_e, vd)) + wedge(F, wedge(h_b, vd))
    return 0.5 * two


def action_density(state: LiftedState, z0: ZetaBlocks, F: PForm) -> PForm:
    """``Lambda_t`` with the blocks frozen at ``t = 0``; the metric enters through ``*_t``, ``V_t``, ``V~_t``."""
    if F.degree != 2:
        raise ValueError("F must be a 2-form")
    if state.V0 is None:
        state = state.with_velocity(z0.V)
    return _lagrangian(state, z0, F)


def action_density_lifted(state: LiftedState, z0: ZetaBlocks, F: PForm) -> PForm:
    """``Lambda_t`` built from the lifted blocks ``zeta_t``; agrees with :func:`action_density`."""
    if state.V0 is None:
        state = state.with_velocity(z0.V)
    return _lagrangian(state, zeta_lift(z0, state), F)


@dataclass(frozen=True)
class VariationCheck:
    lhs: float
    rhs: float
    residual: float


def lambda_dot_fd(z0: ZetaBlocks, F: PForm, var: CoframeVariation, h: float = FD_STEP) -> float:
    """Central difference of ``Lambda_t`` at ``t = 0`` with the fourth-order stencil.

    The two-point stencil's ``h^2`` error reaches ``1e-7`` for boosted media
    with permittivity of a few units, so the extra pair of samples is worth it.
    """
    lam = lambda t: action_density(var.at(t), z0, F).components[0]
    return float((8.0 * (lam(h) - lam(-h)) - (lam(2 * h) - lam(-2 * h))) / (12.0 * h))


def verify_variation(Z: ConstitutiveZ, F: PForm, V, var: CoframeVariation,
                     h: float = FD_STEP) -> VariationCheck:
    """Compare ``d Lambda_t / dt`` at ``t = 0`` with ``edot^a ^ tau_a`` for the Abraham drive forms.

    Inputs are rescaled to unit size before differencing: ``F`` by its largest
    component and ``edot`` by its largest entry.  The returned numbers are in
    the original scale.
    """
    V = as_velocity(V)
    z0 = extract_zeta(Z, V)
    f_scale = max(F.max_abs(), 1e-300)
    e_scale = float(np.max(np.abs(var.E)))
    if e_scale == 0.0:
        return VariationCheck(0.0, 0.0, 0.0)
    Fu = F / f_scale
    unit = CoframeVariation(var.E / e_scale)
    lhs = lambda_dot_fd(z0, Fu, unit, h)
    tau = abraham_drive(Fu, Z, V)
    rhs = sum(wedge(ed, tau[a]).components[0] for a, ed in enumerate(unit.edot))
    k = f_scale ** 2 * e_scale
    return VariationCheck(lhs * k, float(rhs) * k, abs(lhs - rhs) * k)


def drive_from_variation(Z: ConstitutiveZ, F: PForm, V, h: float = FD_STEP) -> DriveForms:
    """Drive forms read off from 16 basis variations ``edot^a = e^b``.

    With ``Lambda-dot = edot^a ^ tau_a`` the probe ``(a, b)`` returns
    ``e^b ^ tau_a``, which fixes the component of ``tau_a`` complementary to ``e^b``.
    """
    V = as_velocity(V)
    z0 = extract_zeta(Z, V)
    rows = []
    for a in range(4):
        comps = np.zeros(4)
        for b in range(4):
            val = lambda_dot_fd(z0, F, CoframeVariation.basis(a, b), h)
            # e^b ^ e^{J} = sign vol for J the complement of b; stored 3-form index 3 - b
            comp = [c for c in range(4) if c != b]
            sign = wedge(coframe(b), PForm.basis(*comp)).components[0]
            comps[3 - b] = val * sign
        rows.append(PForm(3, comps))
    return DriveForms(tuple(rows))


def tensor_from_metric_variation(Z: ConstitutiveZ, F: PForm, V, h: float = FD_STEP) -> SemTensor:
    """Tensor assembled from the 16 probes: ``T_ab = -eta_bb * Lambda-dot(edot^a = e^b)``.

    The action density is minus the usual field Lagrangian, hence the sign;
    the result matches :func:`abraham_tensor`.
    """
    V = as_velocity(V)
    z0 = extract_zeta(Z, V)
    T = np.empty((4, 4))
    for a in range(4):
        for b in range(4):
            T[a, b] = -ETA[b, b] * lambda_dot_fd(z0, F, CoframeVariation.basis(a, b), h)
    return SemTensor(T)
