"""Randomised identity suite and round-trip checks.

Every check returns the largest absolute error seen.  The Hodge map is a
parameter so a deliberately wrong convention can be injected and shown to
fail.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exterior import PForm, coframe, dim, hodge, interior, metric_dual_vec, wedge
from .fields import Velocity, decompose_F, reconstruct_F
from .media import build_from_zeta, extract_zeta, random_self_adjoint
from .sem import abraham_drive, drive_to_tensor, tensor_to_drive
from .variation import CoframeVariation, verify_variation

Hodge = Callable[[PForm], PForm]
IDENTITY_TOL = 1e-12


def random_form(rng: np.random.Generator, p: int) -> PForm:
    return PForm(p, rng.uniform(-1.0, 1.0, dim(p)))


def random_vector(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, 4)


def random_velocity(rng: np.random.Generator, max_rapidity: float = 1.0) -> Velocity:
    return Velocity.from_rapidity(rng.uniform(-max_rapidity, max_rapidity, 3) / np.sqrt(3))


# ---------------------------------------------------------------------------
# the seven identities; each draws one random tuple per call


def id_wedge(rng, star: Hodge = hodge) -> float:
    p, q = rng.integers(0, 5, 2)
    a, b = random_form(rng, p), random_form(rng, q)
    lhs, rhs = wedge(a, b), (-1) ** (p * q) * wedge(b, a)
    return float(np.max(np.abs(lhs.components - rhs.components)))


def id_star_pivot(rng, star: Hodge = hodge) -> float:
    p = rng.integers(0, 5)
    a, b = random_form(rng, p), random_form(rng, p)
    return (wedge(a, star(b)) - wedge(b, star(a))).max_abs()


def id_iX_star(rng, star: Hodge = hodge) -> float:
    p = rng.integers(0, 5)
    a, x = random_form(rng, p), random_vector(rng)
    return (interior(x, star(a)) - star(wedge(a, metric_dual_vec(x)))).max_abs()


def id_star_iX(rng, star: Hodge = hodge) -> float:
    p = rng.integers(1, 5)
    a, x = random_form(rng, p), random_vector(rng)
    return (star(interior(x, a)) + wedge(star(a), metric_dual_vec(x))).max_abs()


def id_star_star(rng, star: Hodge = hodge) -> float:
    p = rng.integers(0, 5)
    a = random_form(rng, p)
    return (star(star(a)) - (-1) ** (p + 1) * a).max_abs()


def id_iX_move(rng, star: Hodge = hodge) -> float:
    # p + q >= 5, so that phi ^ psi vanishes and the contraction moves across
    p = rng.integers(1, 5)
    q = rng.integers(max(1, 5 - p), 5)
    a, b, x = random_form(rng, p), random_form(rng, q), random_vector(rng)
    lhs = wedge(interior(x, a), b)
    rhs = (-1) ** (p + 1) * wedge(a, interior(x, b))
    return float(np.max(np.abs(lhs.components - rhs.components)))


def id_d_move(rng, star: Hodge = hodge) -> float:
    """Algebraic content of moving ``d`` across a product.

    Fields are affine, ``phi(x) = phi_0 + x^a phi_a``, so ``d phi = e^a ^ phi_a``
    exactly.  The Leibniz rule is checked at a random point; when
    ``p + q >= 4`` it reduces to the stated sign rule because ``d(phi ^ psi)``
    is a 5-form.
    """
    p, q = rng.integers(0, 4, 2)
    a0, b0 = random_form(rng, p), random_form(rng, q)
    da = [random_form(rng, p) for _ in range(4)]
    db = [random_form(rng, q) for _ in range(4)]
    x = random_vector(rng)
    a = a0 + sum((x[k] * da[k] for k in range(4)), PForm.zero(p))
    b = b0 + sum((x[k] * db[k] for k in range(4)), PForm.zero(q))
    d_a = sum((wedge(coframe(k), da[k]) for k in range(4)), PForm.zero(p + 1))
    d_b = sum((wedge(coframe(k), db[k]) for k in range(4)), PForm.zero(q + 1))
    # d(a ^ b) from the bilinear expansion of the product's coefficients
    if p + q >= 4:
        lhs = wedge(d_a, b)
        rhs = (-1) ** (p + 1) * wedge(a, d_b)
        return float(np.max(np.abs(lhs.components - rhs.components)))
    grad = []
    for k in range(4):
        grad.append(wedge(da[k], b) + wedge(a, db[k]))
    d_ab = sum((wedge(coframe(k), grad[k]) for k in range(4)), PForm.zero(p + q + 1))
    leibniz = wedge(d_a, b) + (-1) ** p * wedge(a, d_b)
    return (d_ab - leibniz).max_abs()


IDENTITIES: dict[str, Callable] = {
    "id_wedge": id_wedge,
    "id_star_pivot": id_star_pivot,
    "id_iX_star": id_iX_star,
    "id_star_iX": id_star_iX,
    "id_star_star": id_star_star,
    "id_iX_move": id_iX_move,
    "id_d_move": id_d_move,
}


def identity_suite(rng: np.random.Generator, n: int = 1000, star: Hodge = hodge) -> dict[str, float]:
    return {name: max(fn(rng, star) for _ in range(n)) for name, fn in IDENTITIES.items()}


# ---------------------------------------------------------------------------
# round trips


def field_round_trip(rng, n: int = 100) -> float:
    worst = 0.0
    for _ in range(n):
        F, U = random_form(rng, 2), random_velocity(rng)
        worst = max(worst, (reconstruct_F(decompose_F(F, U), U) - F).max_abs())
    return worst


def zeta_round_trip(rng, n: int = 100) -> float:
    worst = 0.0
    for _ in range(n):
        Z, V = random_self_adjoint(rng), random_velocity(rng)
        back = build_from_zeta(extract_zeta(Z, V), tol=1e-10)
        worst = max(worst, float(np.max(np.abs(back.matrix - Z.matrix))))
    return worst


def drive_round_trip(rng, n: int = 100) -> float:
    from .sem import DriveForms

    worst = 0.0
    for _ in range(n):
        tau = DriveForms(tuple(random_form(rng, 3) for _ in range(4)))
        back = tensor_to_drive(drive_to_tensor(tau))
        worst = max(worst, float(np.max(np.abs(back.as_array() - tau.as_array()))))
    return worst


def variation_residual(rng) -> float:
    Z, V = random_self_adjoint(rng), random_velocity(rng)
    F = random_form(rng, 2)
    var = CoframeVariation(rng.uniform(-1.0, 1.0, (4, 4)))
    return verify_variation(Z, F, V, var).residual


@dataclass
class SelftestResult:
    checks: dict[str, float] = field(default_factory=dict)
    thresholds: dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v <= self.thresholds[k]]

    @property
    def passed(self) -> bool:
        return not self.failures


def run_selftest(seed: int = 0, n: int = 200, star: Hodge = hodge) -> SelftestResult:
    rng = np.random.default_rng(seed)
    out = SelftestResult()
    for name, err in identity_suite(rng, n, star).items():
        out.checks[name] = err
        out.thresholds[name] = IDENTITY_TOL
    for name, fn, tol in (
        ("round_trip_field", field_round_trip, 1e-12),
        ("round_trip_zeta", zeta_round_trip, 1e-12),
        ("round_trip_drive", drive_round_trip, 1e-12),
    ):
        out.checks[name] = fn(rng, n // 2 or 1)
        out.thresholds[name] = tol
    out.checks["verify_variation"] = variation_residual(rng)
    out.thresholds["verify_variation"] = 1e-7
    return out
