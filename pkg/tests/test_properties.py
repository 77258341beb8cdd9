"""Randomised invariants driven by hypothesis."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from emdk.exterior import PForm, dim, gram, hodge, inner, interior, wedge
from emdk.fields import Velocity, decompose_F, random_lorentz, reconstruct_F
from emdk.media import ConstitutiveZ, build_from_zeta, extract_zeta, post_invariant
from emdk.sem import abraham_drive, abraham_tensor, drive_to_tensor, polarization_drive_split

unit = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
SETTINGS = settings(max_examples=60, deadline=None)


def forms(p):
    return arrays(float, dim(p), elements=unit).map(lambda c: PForm(p, c))


degrees = st.integers(0, 4)
vectors = arrays(float, 4, elements=unit)
velocities = arrays(float, 3, elements=st.floats(-1.2, 1.2)).map(Velocity.from_rapidity)
self_adjoint = arrays(float, (6, 6), elements=unit).map(
    lambda a: ConstitutiveZ.from_operator(np.linalg.inv(gram(2)) @ (a + a.T) / 2)
)


@SETTINGS
@given(st.data())
def test_graded_commutativity(data):
    p, q = data.draw(degrees), data.draw(degrees)
    a, b = data.draw(forms(p)), data.draw(forms(q))
    lhs, rhs = wedge(a, b), (-1) ** (p * q) * wedge(b, a)
    assert np.max(np.abs(lhs.components - rhs.components)) <= 1e-14


@SETTINGS
@given(st.data())
def test_hodge_double_dual_and_pivot(data):
    p = data.draw(degrees)
    a, b = data.draw(forms(p)), data.draw(forms(p))
    assert (hodge(hodge(a)) - (-1) ** (p + 1) * a).max_abs() <= 1e-15
    assert abs(wedge(a, hodge(b)).components[0] - inner(a, b)) <= 1e-14


@SETTINGS
@given(st.integers(1, 4).flatmap(forms), vectors)
def test_interior_nilpotent(a, x):
    assert interior(x, interior(x, a)).max_abs() <= 1e-15


@SETTINGS
@given(forms(2), velocities)
def test_field_round_trip(F, U):
    assert (reconstruct_F(decompose_F(F, U), U) - F).max_abs() <= 1e-12 * U.components[0] ** 2


@SETTINGS
@given(self_adjoint, velocities)
def test_zeta_round_trip(Z, V):
    back = build_from_zeta(extract_zeta(Z, V), tol=1e-10)
    assert np.max(np.abs(back.matrix - Z.matrix)) <= 1e-12 * V.components[0] ** 4


@SETTINGS
@given(forms(2), self_adjoint, velocities)
def test_abraham_symmetric_and_consistent(F, Z, V):
    T = abraham_tensor(F, Z, V)
    scale = V.components[0] ** 4
    assert T.asymmetry() <= 1e-13 * scale
    diff = drive_to_tensor(abraham_drive(F, Z, V)).components + T.components
    assert np.max(np.abs(diff)) <= 1e-12 * scale


@SETTINGS
@given(forms(2), self_adjoint, velocities)
def test_split_sums_to_drive(F, Z, V):
    total = sum((p.as_array() for p in polarization_drive_split(F, Z, V)), np.zeros((4, 4)))
    assert np.max(np.abs(total - abraham_drive(F, Z, V).as_array())) <= 1e-12 * V.components[0] ** 4


@SETTINGS
@given(self_adjoint, st.integers(0, 2**32 - 1))
def test_post_scalar_frame_invariant(Z, seed):
    L = random_lorentz(np.random.default_rng(seed))
    assert abs(post_invariant(Z.transformed(L)) - post_invariant(Z)) <= 1e-10
