import numpy as np
import pytest

from tenrec import core


def test_mode0_unfold_of_counting_tensor():
    x = np.arange(1.0, 9.0).reshape((2, 2, 2), order="F")
    m = core.unfold(x, 0)
    assert m.tolist() == [[1, 3, 5, 7], [2, 4, 6, 8]]


def test_mode2_unfold_of_counting_tensor():
    x = np.arange(1.0, 9.0).reshape((2, 2, 2), order="F")
    m = core.unfold(x, 2)
    assert m.tolist() == [[1, 2, 3, 4], [5, 6, 7, 8]]


def test_unfold_mode_out_of_range():
    with pytest.raises(ValueError):
        core.unfold(np.zeros((2, 3)), 2)


def test_fold_zero_matrix():
    t = core.fold(np.zeros((3, 8)), 0, (3, 4, 2))
    assert t.shape == (3, 4, 2)
    assert not t.any()


def test_fold_inverts_counting_example():
    m = np.array([[1.0, 3, 5, 7], [2, 4, 6, 8]])
    x = core.fold(m, 0, (2, 2, 2))
    assert np.array_equal(np.ravel(x, order="F"), np.arange(1.0, 9.0))


def test_fold_shape_mismatch():
    with pytest.raises(ValueError):
        core.fold(np.zeros((3, 5)), 0, (3, 4, 2))


@pytest.mark.parametrize("mode", [0, 1, 2])
def test_fold_unfold_round_trip_bit_exact(mode):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((3, 4, 5))
    assert np.array_equal(core.fold(core.unfold(x, mode), mode, x.shape), x)


def test_matrix_round_trip_many_seeds():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        dims = tuple(rng.integers(1, 6, size=rng.integers(2, 5)))
        mode = int(rng.integers(0, len(dims)))
        x = rng.standard_normal(dims)
        m = core.unfold(x, mode)
        assert np.array_equal(core.unfold(core.fold(m, mode, dims), mode), m)


def test_mode_product_identity():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((4, 5, 6))
    assert np.allclose(core.mode_product(x, np.eye(5), 1), x)


def test_mode_product_ones_row_sums():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((4, 5, 6))
    out = core.mode_product(x, np.ones((1, 5)), 1)
    assert np.allclose(out[:, 0, :], x.sum(axis=1), atol=1e-12)


def test_mode_product_matches_unfold_oracle():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((4, 5, 6))
    u = rng.standard_normal((3, 5))
    expected = core.fold(u @ core.unfold(x, 1), 1, (4, 3, 6))
    assert np.max(np.abs(core.mode_product(x, u, 1) - expected)) <= 1e-12


def test_mode_products_commute_on_distinct_modes():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((4, 5, 6))
    u = rng.standard_normal((2, 4))
    v = rng.standard_normal((3, 6))
    a = core.mode_product(core.mode_product(x, u, 0), v, 2)
    b = core.mode_product(core.mode_product(x, v, 2), u, 0)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_mode_product_dim_mismatch():
    with pytest.raises(ValueError):
        core.mode_product(np.zeros((4, 5, 6)), np.zeros((2, 3)), 1)


def test_norms_zero_tensor():
    n = core.norms(np.zeros((2, 3, 4)))
    assert n["fro"] == n["l1"] == n["tube1"] == n["slice1"] == 0.0


def test_norms_all_ones():
    n = core.norms(np.ones((2, 2, 2)))
    assert n["fro"] == pytest.approx(np.sqrt(8))
    assert n["l1"] == 8.0
    assert n["tube1"] == pytest.approx(4 * np.sqrt(2))
    assert n["slice1"] == pytest.approx(4.0)


def test_norms_matches_brute_force():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((3, 4, 5, 2))
    n = core.norms(x)
    fro = np.sqrt(sum(v**2 for v in x.flat))
    l1 = sum(abs(v) for v in x.flat)
    tube1 = sum(
        np.linalg.norm(x[i, j, :, :]) for i in range(3) for j in range(4)
    )
    slice1 = sum(
        np.linalg.norm(x[:, :, k, l]) for k in range(5) for l in range(2)
    )
    assert abs(n["fro"] - fro) <= 1e-13 * fro
    assert abs(n["l1"] - l1) <= 1e-13 * l1
    assert abs(n["tube1"] - tube1) <= 1e-13 * tube1
    assert abs(n["slice1"] - slice1) <= 1e-13 * slice1


def test_norms_ordering_and_matrix_rejection():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((4, 3, 5))
    n = core.norms(x)
    assert n["fro"] - 1e-12 <= n["tube1"] <= n["l1"] + 1e-12
    assert n["fro"] - 1e-12 <= n["slice1"] <= n["l1"] + 1e-12
    with pytest.raises(ValueError):
        core.norms(rng.standard_normal((4, 3)))


def test_inner_basics():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((3, 4, 2))
    y = rng.standard_normal((3, 4, 2))
    assert core.inner(x, np.zeros_like(x)) == 0.0
    assert core.inner(x, x) == pytest.approx(core.norms(x)["fro"] ** 2)
    assert core.inner(x, y) == pytest.approx(float(np.sum(x * y)))
    with pytest.raises(ValueError):
        core.inner(x, np.zeros((3, 4, 3)))


def test_cauchy_schwarz():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((4, 3, 5))
        y = rng.standard_normal((4, 3, 5))
        lhs = abs(core.inner(x, y))
        rhs = core.norms(x)["fro"] * core.norms(y)["fro"]
        assert lhs <= rhs + 1e-12


def test_check_tensor_rejects_bad_input():
    with pytest.raises(ValueError):
        core.check_tensor(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        core.check_tensor(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        core.check_tensor(np.zeros((2, 2)), min_order=3)
