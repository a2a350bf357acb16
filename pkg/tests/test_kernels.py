import os
import subprocess
import sys

import numpy as np
import pytest

from mmfs import kernels

numba_only = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def pts(rng):
    return rng.normal(size=(40, 6))


def test_distances_numpy_matches_direct(pts):
    direct = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    np.testing.assert_allclose(kernels.pairwise_distances_numpy(pts), direct, atol=1e-12)


def test_knn_numpy_ties_lowest_index():
    D = np.array([[0, 1, 1, 1], [1, 0, 2, 2], [1, 2, 0, 2], [1, 2, 2, 0]], float)
    assert kernels.knn_numpy(D, 2).tolist() == [[1, 2], [0, 2], [0, 1], [0, 1]]


@numba_only
def test_distances_agree(pts):
    np.testing.assert_allclose(kernels.pairwise_distances_numba(pts),
                               kernels.pairwise_distances_numpy(pts), atol=1e-12)


@numba_only
@pytest.mark.parametrize("k", [1, 3, 39])
def test_knn_agree(pts, k):
    D = kernels.pairwise_distances_numpy(pts)
    np.testing.assert_array_equal(kernels.knn_numba(D, k), kernels.knn_numpy(D, k))


@numba_only
def test_knn_agree_with_ties():
    D = np.round(kernels.pairwise_distances_numpy(np.arange(12.0)[:, None] % 4), 0)
    np.testing.assert_array_equal(kernels.knn_numba(D, 5), kernels.knn_numpy(D, 5))


@numba_only
@pytest.mark.parametrize("use_max", [False, True])
def test_fold_agree(rng, use_max):
    V1 = np.zeros((15, 15))
    V2 = np.zeros((15, 15))
    for _ in range(4):
        Pt = rng.random((15, 15)) * (rng.random((15, 15)) < 0.5)
        Pt[0, 0] = 1e-16  # below threshold
        kernels.fold_reachability_numba(V1, Pt, use_max, 1e-15)
        kernels.fold_reachability_numpy(V2, Pt, use_max, 1e-15)
    np.testing.assert_array_equal(V1, V2)
    assert V1[0, 0] == 0.0


@numba_only
def test_assign_agree(pts, rng):
    centers = rng.normal(size=(4, 6))
    l1, d1 = kernels.assign_numba(pts, centers)
    l2, d2 = kernels.assign_numpy(pts, centers)
    np.testing.assert_array_equal(l1, l2)
    np.testing.assert_allclose(d1, d2, rtol=1e-12)


@numba_only
def test_assign_tie_lowest_center():
    pts = np.array([[0.0, 0.0]])
    centers = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert kernels.assign_numba(pts, centers)[0][0] == 0
    assert kernels.assign_numpy(pts, centers)[0][0] == 0


@numba_only
def test_contingency_agree(rng):
    a = rng.integers(0, 3, 100)
    b = rng.integers(0, 5, 100)
    t = kernels.contingency_numba(a, b, 3, 5)
    np.testing.assert_array_equal(t, kernels.contingency_numpy(a, b, 3, 5))
    assert t.sum() == 100


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env["MMFS_DISABLE_NUMBA"] = value
    out = subprocess.run([sys.executable, "-c", "import mmfs.kernels as k; print(k.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_flag_selects_numpy():
    assert _backend_in_subprocess("1") == "numpy"


@numba_only
def test_env_flag_default_numba():
    assert _backend_in_subprocess("0") == "numba"


@numba_only
def test_pipeline_same_selection_both_backends(fixture_30x12, tmp_path):
    np.save(tmp_path / "x.npy", fixture_30x12)
    code = ("import numpy as np, mmfs; X = mmfs.DataMatrix(np.load(%r));"
            "print(mmfs.select_maxP(X, s=12).ranking.tolist(),"
            " mmfs.select_minP(X, s=12).ranking.tolist())") % str(tmp_path / "x.npy")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, MMFS_DISABLE_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert outs[0] == outs[1]
