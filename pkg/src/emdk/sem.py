"""Drive 3-forms and stress-energy-momentum tensors.

A drive form ``tau_a`` and a tensor ``T_ab`` carry the same information:
``T_ab = i_{X_b} *tau_a`` and ``tau_a = *(T_ab e^b)``.  Tensor components
are always in the global orthonormal frame, which coincides with Minkowski
coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import ETA, PForm, frame, hodge, inner, interior, lowered_coframe, wedge
from .fields import (
    SpacetimeField,
    as_velocity,
    decompose_F,
    exterior_derivative,
    polarization_split,
    poynting_s,
)
from .media import ConstitutiveZ, is_self_adjoint


@dataclass(frozen=True)
class DriveForms:
    tau: tuple[PForm, PForm, PForm, PForm]

    def __post_init__(self):
        tau = tuple(self.tau)
        if len(tau) != 4 or any(t.degree != 3 for t in tau):
            raise ValueError("drive forms are four 3-forms")
        if not all(np.all(np.isfinite(t.components)) for t in tau):
            raise ValueError("drive forms must be finite")
        object.__setattr__(self, "tau", tau)

    def __getitem__(self, a: int) -> PForm:
        return self.tau[a]

    def __add__(self, other: "DriveForms") -> "DriveForms":
        return DriveForms(tuple(x + y for x, y in zip(self.tau, other.tau)))

    def as_array(self) -> np.ndarray:
        """4x4 array: row a holds the components of tau_a on (012, 013, 023, 123)."""
        return np.array([t.components for t in self.tau])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


@dataclass(frozen=True)
class SemTensor:
    components: np.ndarray

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (4, 4):
            raise ValueError("SEM tensor must be 4x4")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    def __add__(self, other: "SemTensor") -> "SemTensor":
        return SemTensor(self.components + other.components)

    def __sub__(self, other: "SemTensor") -> "SemTensor":
        return SemTensor(self.components - other.components)

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.components - self.components.T)))


def _check_Z(Z: ConstitutiveZ):
    ok, violation = is_self_adjoint(Z)
    if not ok:
        raise ValueError(f"Z must be self-adjoint (violation {violation:.3g})")


# ---------------------------------------------------------------------------
# vacuum


def vacuum_drive(F: PForm, Y) -> PForm:
    """``tau_Y = (i_Y F ^ *F - i_Y *F ^ F) / 2``."""
    sf = hodge(F)
    return 0.5 * (wedge(interior(Y, F), sf) - wedge(interior(Y, sf), F))


@dataclass(frozen=True)
class KillingSplit:
    poynting_part: PForm
    energy_density: float
    K_dual_star: PForm

    @property
    def drive(self) -> PForm:
        return self.poynting_part - self.energy_density * self.K_dual_star


def killing_decompose(F: PForm, K) -> KillingSplit:
    """Energy-current split of the vacuum drive for a unit timelike Killing vector ``K``.

    ``tau_K = e ^ h ^ K~ - (g(e, e) + g(h, h)) / 2 * K~``, with ``h = b`` in vacuum.
    """
    K = as_velocity(K)
    dec = decompose_F(F, K)
    e, h = dec.e, dec.b
    k = K.dual
    density = 0.5 * (float(e.components @ ETA @ e.components) + float(h.components @ ETA @ h.components))
    return KillingSplit(wedge(wedge(e, h), k), density, hodge(k))


def vacuum_drive_forms(F: PForm) -> DriveForms:
    return DriveForms(tuple(vacuum_drive(F, frame(a)) for a in range(4)))


# ---------------------------------------------------------------------------
# drive forms <-> tensors


def drive_to_tensor(tau: DriveForms) -> SemTensor:
    t = np.empty((4, 4))
    for a in range(4):
        st = hodge(tau[a])
        for b in range(4):
            t[a, b] = interior(frame(b), st).components[0]
    return SemTensor(t)


def tensor_to_drive(T: SemTensor) -> DriveForms:
    return DriveForms(tuple(hodge(PForm(1, T.components[a])) for a in range(4)))


def symmetry_violation(tau: DriveForms) -> float:
    """max |e_c ^ tau_b - e_b ^ tau_c|; zero iff the associated tensor is symmetric."""
    worst = 0.0
    for b in range(4):
        for c in range(b + 1, 4):
            diff = wedge(lowered_coframe(c), tau[b]) - wedge(lowered_coframe(b), tau[c])
            worst = max(worst, diff.max_abs())
    return worst


# ---------------------------------------------------------------------------
# media


def abraham_drive(F: PForm, Z: ConstitutiveZ, V) -> DriveForms:
    """``tau_a = (F ^ i_a *G - i_a G ^ *F)/2 + V_a *s - e_a ^ i_V *s / 2``."""
    _check_Z(Z)
    V = as_velocity(V)
    G = Z(F)
    sG, sF = hodge(G), hodge(F)
    ss = hodge(poynting_s(F, G, V))
    iv_ss = interior(V, ss)
    v_low = V.lowered
    out = []
    for a in range(4):
        xa = frame(a)
        tau = 0.5 * (wedge(F, interior(xa, sG)) - wedge(interior(xa, G), sF))
        tau = tau + v_low[a] * ss - 0.5 * wedge(lowered_coframe(a), iv_ss)
        out.append(tau)
    return DriveForms(tuple(out))


def _contraction_part(F: PForm, G: PForm) -> np.ndarray:
    # (i_a F (x) i^a G + i_a G (x) i^a F - <F, G> g) / 2, with <F, G> vol = F ^ *G
    iF = np.array([interior(frame(a), F).components for a in range(4)])
    iG = np.array([interior(frame(a), G).components for a in range(4)])
    sym = iF.T @ np.linalg.inv(ETA) @ iG
    scalar = inner(F, G)
    return 0.5 * (sym + sym.T - scalar * ETA)


def abraham_tensor_from_fields(F: PForm, G: PForm, V) -> SemTensor:
    """Abraham tensor for an arbitrary pair ``(F, G)``; no constitutive checks."""
    V = as_velocity(V)
    s = poynting_s(F, G, V).components
    v = V.lowered
    return SemTensor(_contraction_part(F, G) - 0.5 * (np.outer(v, s) + np.outer(s, v)))


def abraham_tensor(F: PForm, Z: ConstitutiveZ, V) -> SemTensor:
    """``T = (i_a F (x) i^a G + i_a G (x) i^a F - <F, G> g - V~ (x) s - s (x) V~) / 2``.

    Normalised so that the comoving energy density is ``(E.D + H.B) / 2``.
    The drive forms of the action ``F ^ *G / 2`` carry the opposite overall
    sign: ``drive_to_tensor(abraham_drive(F, Z, V)) == -abraham_tensor(F, Z, V)``.
    """
    _check_Z(Z)
    return abraham_tensor_from_fields(F, Z(F), V)


def minkowski_sym_drive(F: PForm, Z: ConstitutiveZ) -> DriveForms:
    """Drive forms for a metric-independent ``Z``: ``(F ^ i_a *G - i_a G ^ *F) / 2``."""
    _check_Z(Z)
    G = Z(F)
    sG, sF = hodge(G), hodge(F)
    return DriveForms(tuple(
        0.5 * (wedge(F, interior(frame(a), sG)) - wedge(interior(frame(a), G), sF)) for a in range(4)
    ))


def minkowski_sym_tensor(F: PForm, Z: ConstitutiveZ) -> SemTensor:
    """Symmetrised Minkowski tensor; independent of any medium velocity."""
    _check_Z(Z)
    return SemTensor(_contraction_part(F, Z(F)))


def polarization_drive_split(F: PForm, Z: ConstitutiveZ, V) -> tuple[DriveForms, ...]:
    """Abraham drive forms split into four pieces built from ``p``, ``m`` and ``F``.

    * ``tau1``: the field part ``(i_c *G' ^ F - i_c G' ^ *F) / 2`` with ``G' = F + p ^ V~``
    * ``tau2``: ``V_c (p ^ *F + m ^ F - q ^ V~) / 2``
    * ``tau3``: the magnetisation part ``(i_c F ^ m ^ V~ + i_c *F ^ *(m ^ V~)) / 2``
    * ``tau4``: ``-(V_c (p ^ *F + m ^ F) + V_c V~ ^ q + e_c ^ q) / 2``

    where ``q = p ^ b - m ^ e``.  The pieces sum to :func:`abraham_drive`;
    ``tau2 .. tau4`` vanish in vacuum and ``tau3`` vanishes when ``m = 0``.
    """
    _check_Z(Z)
    V = as_velocity(V)
    G = Z(F)
    pol = polarization_split(F, G, V)
    p, m = pol.p, pol.m
    v = V.dual
    v_low = V.lowered
    sF = hodge(F)
    e, b = interior(V, F), interior(V, sF)
    q = wedge(p, b) - wedge(m, e)
    p_sf_m_f = wedge(p, sF) + wedge(m, F)
    m_v = wedge(m, v)
    g_e = F + wedge(p, v)
    sg_e = hodge(g_e)
    t1, t2, t3, t4 = [], [], [], []
    for c in range(4):
        xc = frame(c)
        t1.append(0.5 * (wedge(interior(xc, sg_e), F) - wedge(interior(xc, g_e), sF)))
        t2.append(0.5 * v_low[c] * (p_sf_m_f - wedge(q, v)))
        t3.append(0.5 * (wedge(interior(xc, F), m_v) + wedge(interior(xc, sF), hodge(m_v))))
        t4.append(-0.5 * (v_low[c] * p_sf_m_f + v_low[c] * wedge(v, q) + wedge(lowered_coframe(c), q)))
    return tuple(DriveForms(tuple(t)) for t in (t1, t2, t3, t4))


def medium_drive(F: PForm, G: PForm, K) -> PForm:
    """``(i_K F ^ *G - i_K *G ^ F) / 2``; reduces to the vacuum drive when ``G = F``."""
    sG = hodge(G)
    return 0.5 * (wedge(interior(K, F), sG) - wedge(interior(K, sG), F))


def conservation_residual(F: SpacetimeField, Z: ConstitutiveZ, K, j: SpacetimeField | None, x,
                          h: float | None = None) -> float:
    """max-abs of ``d tau_K + i_K F ^ j`` at ``x`` by central differences.

    ``K`` must have constant components (a translation Killing vector).
    """
    K = np.asarray(K, dtype=float)
    tau = F.map(lambda f: medium_drive(f, Z(f), K), 3)
    dtau = exterior_derivative(tau, x, h)
    if j is not None:
        dtau = dtau + wedge(interior(K, F(x)), j(x))
    return dtau.max_abs()


def dust_total_tensor(T_em: SemTensor, N: float, m0: float, V) -> SemTensor:
    """``T_em + m0 N V~ (x) V~`` for a cold, pressureless fluid."""
    if N < 0:
        raise ValueError("number density must be non-negative")
    v = as_velocity(V).lowered
    return SemTensor(T_em.components + m0 * N * np.outer(v, v))
