"""Spectral non-rigid shape matching (Laplacian embedding, eigensignature alignment, EM registration)."""

from ._core import (
    Error,
    Mesh,
    StageError,
    birkhoff,
    embed,
    embed_graph,
    exact_isomorphism,
    hungarian,
    load_mesh,
    make_cylinder,
    make_sphere,
    make_torus,
    match,
    registration_error,
    selftest,
    synth,
    umeyama,
)

__all__ = [
    "Error",
    "Mesh",
    "StageError",
    "birkhoff",
    "embed",
    "embed_graph",
    "exact_isomorphism",
    "hungarian",
    "load_mesh",
    "make_cylinder",
    "make_sphere",
    "make_torus",
    "match",
    "registration_error",
    "selftest",
    "synth",
    "umeyama",
]
