"""Field strengths, observer splits and finite-difference exterior derivatives.

All 1-forms produced here use the rescaled convention where the stored
magnetic quantities are ``c b`` and ``h / c``; in natural units these are
simply ``b`` and ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exterior import ETA, PForm, coframe, hodge, interior, wedge

SPATIAL_TOL = 1e-12


class Velocity:
    """Unit, future-pointing timelike vector."""

    __slots__ = ("components",)

    def __init__(self, components, tol: float = 1e-12):
        comps = np.array(components, dtype=float).reshape(4)
        norm = comps @ ETA @ comps
        scale = max(1.0, comps[0] ** 2)
        if not np.all(np.isfinite(comps)) or abs(norm + 1.0) > tol * scale:
            raise ValueError(f"velocity is not unit timelike: g(V, V) = {norm!r}")
        if comps[0] <= 0:
            raise ValueError("velocity must be future pointing (V^0 > 0)")
        comps.setflags(write=False)
        self.components = comps

    @classmethod
    def from_rapidity(cls, w) -> "Velocity":
        w = np.asarray(w, dtype=float).reshape(3)
        if not np.all(np.isfinite(w)):
            raise ValueError("rapidity must be finite")
        r = float(np.linalg.norm(w))
        spatial = np.sinh(r) * w / r if r > 0 else np.zeros(3)
        return cls(np.concatenate([[np.cosh(r)], spatial]))

    @classmethod
    def rest(cls) -> "Velocity":
        return cls([1.0, 0.0, 0.0, 0.0])

    def rapidity(self) -> np.ndarray:
        spatial = self.components[1:]
        s = float(np.linalg.norm(spatial))
        if s == 0.0:
            return np.zeros(3)
        return np.arcsinh(s) * spatial / s

    @property
    def dual(self) -> PForm:
        return PForm(1, ETA @ self.components)

    @property
    def lowered(self) -> np.ndarray:
        """``V_a = eta_ab V^b``."""
        return ETA @ self.components

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __repr__(self):
        return f"Velocity({np.array2string(self.components, precision=6)})"


def as_velocity(v) -> Velocity:
    return v if isinstance(v, Velocity) else Velocity(v)


@dataclass(frozen=True)
class FieldDecomp:
    """A pair of spatial 1-forms: (e, b) for F or (d, h) for G."""

    e: PForm
    b: PForm

    def is_spatial(self, u, tol: float = SPATIAL_TOL) -> bool:
        scale = max(1.0, self.e.max_abs(), self.b.max_abs()) * max(1.0, abs(np.asarray(u)[0]))
        return (
            abs(interior(u, self.e).components[0]) <= tol * scale
            and abs(interior(u, self.b).components[0]) <= tol * scale
        )


def _check_two_form(f: PForm, name: str = "F"):
    if f.degree != 2:
        raise ValueError(f"{name} must be a 2-form, got degree {f.degree}")


def decompose_F(F: PForm, U) -> FieldDecomp:
    """``e = i_U F`` and ``b = i_U *F``."""
    _check_two_form(F)
    U = as_velocity(U)
    return FieldDecomp(interior(U, F), interior(U, hodge(F)))


def reconstruct_F(dec: FieldDecomp, U) -> PForm:
    """``F = e ^ U~ - *(b ^ U~)``."""
    U = as_velocity(U)
    if not dec.is_spatial(U):
        raise ValueError("decomposition is not spatial with respect to U")
    u = U.dual
    return wedge(dec.e, u) - hodge(wedge(dec.b, u))


def decompose_G(G: PForm, U) -> FieldDecomp:
    """``d = i_U G`` and ``h = i_U *G``, returned in the (e, b) slots."""
    _check_two_form(G, "G")
    return decompose_F(G, U)


reconstruct_G = reconstruct_F


def field_from_vectors(E, B) -> PForm:
    """2-form seen by the rest observer ``X_0`` as electric ``E`` and magnetic ``B`` 3-vectors."""
    e = PForm(1, np.concatenate([[0.0], np.asarray(E, dtype=float)]))
    b = PForm(1, np.concatenate([[0.0], np.asarray(B, dtype=float)]))
    return reconstruct_F(FieldDecomp(e, b), Velocity.rest())


def boost_matrix(w) -> np.ndarray:
    """Pure boost taking ``X_0`` to ``Velocity.from_rapidity(w)`` (acts on vector components)."""
    w = np.asarray(w, dtype=float).reshape(3)
    r = float(np.linalg.norm(w))
    L = np.eye(4)
    if r == 0.0:
        return L
    n = w / r
    ch, sh = np.cosh(r), np.sinh(r)
    L[0, 0] = ch
    L[0, 1:] = L[1:, 0] = sh * n
    L[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return L


def rotation_matrix(axis_angle) -> np.ndarray:
    """Spatial rotation (Rodrigues) embedded in a 4x4 Lorentz matrix."""
    v = np.asarray(axis_angle, dtype=float).reshape(3)
    theta = float(np.linalg.norm(v))
    R = np.eye(4)
    if theta == 0.0:
        return R
    k = v / theta
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    R[1:, 1:] = np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * K @ K
    return R


def random_lorentz(rng: np.random.Generator, max_rapidity: float = 1.0) -> np.ndarray:
    """A random proper orthochronous Lorentz matrix (rotation times boost)."""
    return rotation_matrix(rng.uniform(-np.pi, np.pi, 3)) @ boost_matrix(
        rng.uniform(-max_rapidity, max_rapidity, 3)
    )


def poynting_s(F: PForm, G: PForm, V) -> PForm:
    """``s = *(i_V F ^ i_V *G ^ V~ + i_V *F ^ i_V G ^ V~)``."""
    V = as_velocity(V)
    v = V.dual
    e, b = interior(V, F), interior(V, hodge(F))
    d, h = interior(V, G), interior(V, hodge(G))
    return hodge(wedge(wedge(e, h), v) + wedge(wedge(b, d), v))


@dataclass(frozen=True)
class Polarization:
    p: PForm
    m: PForm
    P: PForm


def polarization_split(F: PForm, G: PForm, V) -> Polarization:
    """Comoving polarisation ``p = d - e``, magnetisation ``m = b - h`` and the 2-form ``P``.

    ``P = p ^ V~ + *(m ^ V~)`` so that ``G = F + P``.
    """
    V = as_velocity(V)
    fe = decompose_F(F, V)
    gd = decompose_G(G, V)
    p = gd.e - fe.e
    m = fe.b - gd.b
    v = V.dual
    return Polarization(p, m, wedge(p, v) + hodge(wedge(m, v)))


# ---------------------------------------------------------------------------
# fields sampled on Minkowski coordinates


@dataclass(frozen=True)
class SpacetimeField:
    """A form-valued function of Minkowski coordinates ``(x^0, x^1, x^2, x^3)``.

    The sampler must be reentrant; it is called at many points.
    """

    sampler: Callable[[np.ndarray], PForm]
    degree: int
    stencil_h: float = 1e-3

    def __call__(self, x) -> PForm:
        x = np.asarray(x, dtype=float)
        out = self.sampler(x)
        if out.degree != self.degree:
            raise ValueError(f"sampler returned degree {out.degree}, expected {self.degree}")
        if not np.all(np.isfinite(out.components)):
            raise ValueError(f"non-finite field sample at x = {x.tolist()}")
        return out

    def map(self, fn: Callable[[PForm], PForm], degree: int) -> "SpacetimeField":
        return SpacetimeField(lambda x: fn(self(x)), degree, self.stencil_h)


def exterior_derivative(f: SpacetimeField, x, h: float | None = None) -> PForm:
    """Central-difference ``df = sum_a e^a ^ d_a f`` at the point ``x``."""
    h = f.stencil_h if h is None else h
    if not h > 0:
        raise ValueError("stencil step must be positive")
    x = np.asarray(x, dtype=float)
    if f.degree == 4:
        return PForm(4, [0.0], degenerate=True)
    out = PForm.zero(f.degree + 1)
    for a in range(4):
        step = np.zeros(4)
        step[a] = h
        partial = (f(x + step) - f(x - step)) / (2.0 * h)
        out = out + wedge(coframe(a), partial)
    return out


@dataclass(frozen=True)
class MaxwellResiduals:
    dF: PForm
    source_residual: float


def maxwell_residuals(F: SpacetimeField, Z, j: SpacetimeField | None, x, h: float | None = None) -> MaxwellResiduals:
    """``dF`` and the max-abs of ``d*Z(F) - j`` at ``x``.

    ``Z`` is any callable acting on 2-forms; ``j=None`` means no source.
    """
    dF = exterior_derivative(F, x, h)
    star_g = F.map(lambda f: hodge(Z(f)), 2)
    dsg = exterior_derivative(star_g, x, h)
    if j is not None:
        dsg = dsg - j(x)
    return MaxwellResiduals(dF, dsg.max_abs())


# canonical samplers

def uniform_field(F: PForm, h: float = 1e-3) -> SpacetimeField:
    return SpacetimeField(lambda x: F, F.degree, h)


def plane_wave(direction, polarization, amplitude: float = 1.0, phase: float = 0.0,
               h: float = 1e-3) -> SpacetimeField:
    """Vacuum plane wave ``F = A cos(u + phase) du ^ eps`` with ``u = x^0 - n.x``.

    ``polarization`` is projected orthogonal to the unit direction ``n``.
    """
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    pol = np.asarray(polarization, dtype=float)
    pol = pol - (pol @ n) * n
    norm = np.linalg.norm(pol)
    if norm == 0:
        raise ValueError("polarization must not be parallel to the direction")
    pol = pol / norm
    du = PForm(1, np.concatenate([[1.0], -n]))
    eps = PForm(1, np.concatenate([[0.0], pol]))
    shape = wedge(du, eps)

    def sample(x):
        u = x[0] - n @ x[1:]
        return amplitude * np.cos(u + phase) * shape

    return SpacetimeField(sample, 2, h)


def coulomb_field(charge: float = 1.0, center=(0.0, 0.0, 0.0), h: float = 1e-3) -> SpacetimeField:
    """Static point-charge field ``F = e^0 ^ E.dx`` with ``E = q r / (4 pi |r|^3)``."""
    center = np.asarray(center, dtype=float)
    e0 = coframe(0)

    def sample(x):
        r = x[1:] - center
        E = charge * r / (4 * np.pi * np.linalg.norm(r) ** 3)
        return wedge(e0, PForm(1, np.concatenate([[0.0], E])))

    return SpacetimeField(sample, 2, h)
