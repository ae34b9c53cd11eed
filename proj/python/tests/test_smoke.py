import numpy as np
import pytest

import spectral_match as sm


def path_adjacency(n):
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return a


def test_selftest():
    failures, text = sm.selftest()
    assert failures == 0, text


def test_embed_p3_matches_pinv():
    a = path_adjacency(3)
    coords, theta = sm.embed_graph(a, k=2, embedding="sm1")
    assert coords.shape == (2, 3)
    lap = np.diag(a.sum(axis=1)) - a
    gram = coords.T @ coords
    assert np.allclose(gram, np.linalg.pinv(lap), atol=1e-9)
    assert theta[0] == pytest.approx(0.5)


def test_hungarian_against_brute_force():
    from itertools import permutations

    rng = np.random.default_rng(3)
    cost = rng.random((5, 5))
    best = min(permutations(range(5)), key=lambda p: sum(cost[i, p[i]] for i in range(5)))
    assert list(sm.hungarian(cost)) == list(best)


def test_birkhoff_reconstructs():
    rng = np.random.default_rng(7)
    x = np.zeros((4, 4))
    for w in rng.dirichlet(np.ones(3)):
        x[np.arange(4), rng.permutation(4)] += w
    terms = sm.birkhoff(x)
    recon = np.zeros_like(x)
    for w, mapping in terms:
        recon[np.arange(4), mapping] += w
    assert np.allclose(recon, x)


def test_exact_isomorphism_relabel():
    rng = np.random.default_rng(11)
    n = 7
    w = np.triu(rng.random((n, n)) + 0.1 * np.arange(n), 1)
    a = w + w.T
    mapping = rng.permutation(n)
    p = np.zeros((n, n))
    p[np.arange(n), mapping] = 1.0
    b = p.T @ a @ p
    r = sm.exact_isomorphism(a, b)
    assert r is not None and r["exact"]
    q = np.zeros((n, n))
    q[np.arange(n), r["permutation"]] = 1.0
    assert np.allclose(q @ b @ q.T, a)


def test_mesh_roundtrip(tmp_path):
    mesh = sm.make_sphere(rings=6, segments=8)
    assert mesh.vertices.shape == (mesh.vertex_count, 3)
    path = tmp_path / "s.off"
    mesh.save(str(path))
    back = sm.load_mesh(str(path))
    assert np.allclose(back.vertices, mesh.vertices)
    assert np.array_equal(back.faces, mesh.faces)


def test_match_isometry_is_exact():
    mesh = sm.make_sphere(rings=12, segments=16, bumps=4)
    other, gt = sm.synth(mesh, "isometry_relabel", seed=5)
    result = sm.match(mesh, other)
    err = sm.registration_error(result["matches"], gt, mesh)
    assert err["exact_match_rate"] >= 0.99
    assert result["report"]["k"] >= 1


def test_stage_error_label():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
    f = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
    tetra = sm.Mesh(v, f)
    blob = sm.make_sphere(rings=10, segments=12, bumps=3)
    with pytest.raises(sm.StageError, match="alignment"):
        sm.match(tetra, blob, k=3)


def test_bad_config():
    mesh = sm.make_sphere(rings=6, segments=8)
    with pytest.raises(sm.StageError, match="config"):
        sm.match(mesh, mesh, theta=1.5)
