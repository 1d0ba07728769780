from .trisurface import (
    ConeProfile,
    MeshError,
    TOL_ANGLE,
    TriSurface,
    ValidationReport,
    corner_angles_from_lengths,
    double,
    face_layouts,
    validate_alexandrov,
)
from .generators import (
    GENERATORS,
    antipodal_vertex_pair,
    cone,
    doubled_disk,
    flat_disk,
    flat_rect,
    flat_torus,
    generate,
    saddle_fan,
    sphere,
    sqrt_horn,
)
from .meshio import load_obj, save_obj

__all__ = [
    "ConeProfile", "MeshError", "TOL_ANGLE", "TriSurface", "ValidationReport",
    "corner_angles_from_lengths", "double", "face_layouts", "validate_alexandrov",
    "GENERATORS", "antipodal_vertex_pair", "cone", "doubled_disk", "flat_disk",
    "flat_rect", "flat_torus", "generate", "saddle_fan", "sphere", "sqrt_horn",
    "load_obj", "save_obj",
]
