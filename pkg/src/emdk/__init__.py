"""Exterior-calculus toolkit for electromagnetic media in flat spacetime.

Forms and Hodge duals, observer splits, constitutive tensors and their
classification, stress-energy-momentum drive forms, and a finite-difference
check of their metric variation.
"""
from .exterior import PForm, coframe, frame, hodge, inner, interior, wedge
from .fields import (
    Velocity,
    decompose_F,
    decompose_G,
    field_from_vectors,
    plane_wave,
    poynting_s,
    reconstruct_F,
)
from .media import (
    ClassifyOptions,
    ConstitutiveZ,
    Verdict,
    ZetaBlocks,
    build_anisotropic,
    build_from_zeta,
    build_isotropic,
    classify_intrinsic,
    count_free_components,
    extract_zeta,
    post_example,
    post_invariant,
    post_invariant_zeta,
)
from .sem import (
    DriveForms,
    SemTensor,
    abraham_drive,
    abraham_tensor,
    drive_to_tensor,
    minkowski_sym_tensor,
    tensor_to_drive,
    vacuum_drive,
)
from .variation import CoframeVariation, hodge_dot, verify_variation

__version__ = "0.1.0"
