import numpy as np
import pytest

from tenrec import (
    L1,
    MCP,
    SCAD,
    LogPenalty,
    Lq,
    ShrinkStructure,
    Transform,
    face_singular_values,
    gnhtctv_value,
    gnhtsvt,
    gnhtt,
    upsilon_value,
)
from tenrec.transform import _as_faces

FFT = Transform.fft()


def test_structure_validation():
    with pytest.raises(ValueError):
        ShrinkStructure("block")
    assert ShrinkStructure("tube") == "tube"


# -- structured shrinkage ------------------------------------------------------


def test_gnhtt_zero_input_all_modes():
    z = np.zeros((3, 4, 5))
    for structure in ("entry", "tube", "slice"):
        assert not gnhtt(z, MCP(2.5), 0.7, structure).any()


def test_gnhtt_entry_equals_soft_threshold():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 5, 6))
    out = gnhtt(a, L1(), 0.4, "entry")
    assert np.allclose(out, np.sign(a) * np.maximum(np.abs(a) - 0.4, 0.0))


def test_gnhtt_single_tube_example():
    a = np.zeros((4, 5, 9))
    tube = np.random.default_rng(1).standard_normal(9)
    a[2, 3, :] = tube * (3.0 / np.linalg.norm(tube))  # tube of norm 3
    out = gnhtt(a, L1(), 1.0, "tube")
    assert np.allclose(out[2, 3, :], a[2, 3, :] * (2.0 / 3.0))
    mask = np.ones(a.shape, bool)
    mask[2, 3, :] = False
    assert not out[mask].any()


def test_gnhtt_tube_matches_group_prox_oracle():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((3, 4, 5, 2))
    pen = MCP(2.0)
    out = gnhtt(a, pen, 0.8, "tube")
    for i in range(3):
        for j in range(4):
            g = a[i, j]
            norm = np.linalg.norm(g)
            scale = pen.prox(0.8, norm) / norm
            assert np.allclose(out[i, j], g * scale, atol=1e-12)


def test_gnhtt_slice_matches_group_prox_oracle():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 5, 3))
    pen = SCAD(3.7)
    out = gnhtt(a, pen, 0.5, "slice")
    for k in range(3):
        norm = np.linalg.norm(a[:, :, k])
        scale = pen.prox(0.5, norm) / norm
        assert np.allclose(out[:, :, k], a[:, :, k] * scale, atol=1e-12)


def test_gnhtt_group_separability_bit_exact():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((4, 3, 6))
    full = gnhtt(a, Lq(0.5), 0.6, "tube")
    for i in range(4):
        for j in range(3):
            single = np.zeros_like(a)
            single[i, j, :] = a[i, j, :]
            alone = gnhtt(single, Lq(0.5), 0.6, "tube")
            assert np.array_equal(alone[i, j, :], full[i, j, :])


def test_gnhtt_structure_requires_order_three():
    with pytest.raises(ValueError):
        gnhtt(np.ones((3, 4)), L1(), 0.5, "tube")
    with pytest.raises(ValueError):
        gnhtt(np.ones((3, 4, 5)), L1(), -0.5, "entry")


# -- singular value thresholding -----------------------------------------------


def test_gnhtsvt_tau_zero_is_identity():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((6, 7, 4))
    assert np.max(np.abs(gnhtsvt(a, FFT, MCP(2.5), 0.0) - a)) <= 1e-10


def test_gnhtsvt_l1_matches_per_face_svt_oracle():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((10, 8, 4))
    tau = 0.6
    out = gnhtsvt(a, FFT, L1(), tau)
    af = _as_faces(FFT.apply(a))
    oracle = np.empty_like(af)
    for j in range(4):
        u, s, vh = np.linalg.svd(af[:, :, j], full_matrices=False)
        oracle[:, :, j] = (u * np.maximum(s - tau, 0.0)) @ vh
    expected = FFT.inverse(oracle.reshape(a.shape, order="F"))
    assert np.max(np.abs(out - expected)) <= 1e-9


@pytest.mark.parametrize("pen", [MCP(2.0), SCAD(3.0), Lq(0.5), LogPenalty(0.8)],
                         ids=lambda p: type(p).__name__)
def test_gnhtsvt_thresholds_face_singular_values(pen):
    rng = np.random.default_rng(7)
    a = rng.standard_normal((8, 6, 5))
    tau = 0.4
    out = gnhtsvt(a, FFT, pen, tau)
    expected = pen.prox(tau, face_singular_values(a, FFT))
    got = face_singular_values(out, FFT)
    assert np.max(np.abs(np.sort(got, axis=0) - np.sort(expected, axis=0))) <= 1e-9


def test_gnhtsvt_f_diagonal_input_with_constant_tubes():
    # constant tubes transform to identical diagonal faces under the FFT,
    # so the output diagonals are the scalar prox of the input diagonals
    diag = np.array([5.0, 2.0, 0.5])
    a = np.zeros((3, 3, 4))
    for i, v in enumerate(diag):
        a[i, i, 0] = v  # FFT of [v,0,0,0] tube is constant v across faces
    pen = MCP(2.0)
    tau = 0.8
    out = gnhtsvt(a, FFT, pen, tau)
    expected = np.zeros_like(a)
    for i, v in enumerate(diag):
        expected[i, i, 0] = pen.prox(tau, v)
    assert np.max(np.abs(out - expected)) <= 1e-10


def test_gnhtsvt_rejects_negative_tau_and_matrices():
    with pytest.raises(ValueError):
        gnhtsvt(np.ones((3, 3, 3)), FFT, L1(), -1.0)
    with pytest.raises(ValueError):
        gnhtsvt(np.ones((3, 3)), FFT, L1(), 1.0)


# -- diagnostic values ---------------------------------------------------------


def test_gnhtctv_zero_tensor():
    assert gnhtctv_value(np.zeros((4, 4, 3)), (0, 1, 2), FFT, L1()) == 0.0


def test_gnhtctv_l1_matches_gradient_htnn():
    from tenrec import grad, htnn

    rng = np.random.default_rng(8)
    a = rng.standard_normal((5, 6, 4))
    modes = (0, 2)
    val = gnhtctv_value(a, modes, FFT, L1())
    expected = sum(htnn(grad(a, k), FFT) for k in modes) / len(modes)
    assert val == pytest.approx(expected, rel=1e-10)


def test_upsilon_value_entry_and_groups():
    rng = np.random.default_rng(9)
    e = rng.standard_normal((3, 4, 5))
    assert upsilon_value(e, L1(), "entry") == pytest.approx(np.abs(e).sum())
    tubes = np.sqrt((e**2).sum(axis=2))
    assert upsilon_value(e, L1(), "tube") == pytest.approx(tubes.sum())
    slices = np.sqrt((e**2).sum(axis=(0, 1)))
    assert upsilon_value(e, L1(), "slice") == pytest.approx(slices.sum())
