"""Backend parity: the numba kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from spin_atlas.hamiltonian import hamiltonian_terms, probe_projector_vector
from spin_atlas.kernels import active_backend, batched_eigh_project
from spin_atlas.system import Site, SpinSystem

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def example_batch(complex_field=False):
    spec = SpinSystem(
        sites=[
            Site(kind="nv_electron"),
            Site(kind="nv_electron", axis=(2.0 * np.sqrt(2.0) / 3.0, 0.0, -1.0 / 3.0)),
        ]
    )
    h_const, h_d, h_b = hamiltonian_terms(spec)
    h0 = h_const + 2870.385 * h_d
    fields = np.linspace(0.5, 1100.0, 24)
    hams = h0[None] + fields[:, None, None] * h_b[None]
    if complex_field:
        hams = hams.astype(complex)
    else:
        hams = hams.real
    v0, d_pre, d_post = probe_projector_vector(spec)
    return hams, v0, d_pre, d_post


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("complex_field", [False, True])
def test_backends_agree(monkeypatch, complex_field):
    hams, v0, d_pre, d_post = example_batch(complex_field)
    monkeypatch.setenv("SPIN_ATLAS_BACKEND", "numpy")
    vals_np, projs_np, _ = batched_eigh_project(hams, v0, d_pre, d_post)
    monkeypatch.setenv("SPIN_ATLAS_BACKEND", "numba")
    vals_nb, projs_nb, _ = batched_eigh_project(hams, v0, d_pre, d_post)
    assert np.allclose(vals_np, vals_nb, atol=1e-9)
    assert np.allclose(projs_np, projs_nb, atol=1e-9)


def test_numpy_backend_selected(monkeypatch):
    monkeypatch.setenv("SPIN_ATLAS_BACKEND", "numpy")
    assert active_backend() == "numpy"


def test_invalid_backend_rejected(monkeypatch):
    monkeypatch.setenv("SPIN_ATLAS_BACKEND", "fortran")
    with pytest.raises(ValueError, match="auto|numba|numpy"):
        active_backend()


def test_keep_vectors_returns_orthonormal(monkeypatch):
    monkeypatch.setenv("SPIN_ATLAS_BACKEND", "numpy")
    hams, v0, d_pre, d_post = example_batch()
    vals, projs, vecs = batched_eigh_project(hams, v0, d_pre, d_post, True)
    assert vecs is not None
    gram = vecs[0].conj().T @ vecs[0]
    assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-9)


def test_thread_cap_smoke(monkeypatch):
    monkeypatch.setenv("SPIN_ATLAS_THREADS", "1")
    hams, v0, d_pre, d_post = example_batch()
    vals, projs, _ = batched_eigh_project(hams, v0, d_pre, d_post)
    assert vals.shape == projs.shape == hams.shape[:2]
