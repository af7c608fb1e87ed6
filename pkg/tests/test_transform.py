import numpy as np
import pytest

from tenrec import (
    Transform,
    TransformError,
    face_singular_values,
    htnn,
    identity_tensor,
    tproduct,
    tsvd,
)
from tenrec.transform import _as_faces, ttranspose

FFT = Transform.fft()
DCT = Transform.dct()


def _random_orthogonal_scaled(n, alpha, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    return q * np.sqrt(alpha)


def transforms_for(trailing, seed=0):
    mats = [
        _random_orthogonal_scaled(n, 1.0 + 0.5 * i, seed + i)
        for i, n in enumerate(trailing)
    ]
    return [FFT, DCT, Transform.explicit(mats)]


# -- forward / inverse --------------------------------------------------------


def test_trailing_singleton_fft_is_identity():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((4, 3, 1, 1))
    assert np.allclose(FFT.apply(x).real, x)
    assert np.max(np.abs(FFT.apply(x).imag)) == 0.0


def test_round_trip_many_seeds():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 4, 5))
        for t in transforms_for((5,), seed):
            assert np.max(np.abs(t.inverse(t.apply(x)) - x)) <= 1e-12


def test_fft_energy_identity_4x4x8():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((4, 4, 8))
    ratio = np.linalg.norm(FFT.apply(x)) ** 2 / np.linalg.norm(x) ** 2
    assert ratio == pytest.approx(8.0, rel=1e-10)


def test_energy_identity_general():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((5, 4, 3, 6))
    for t in transforms_for((3, 6), 5):
        rho = t.rho(x.shape)
        ratio = np.linalg.norm(t.apply(x)) ** 2 / np.linalg.norm(x) ** 2
        assert ratio == pytest.approx(rho, rel=1e-10)


def test_inverse_zero():
    assert not DCT.inverse(np.zeros((2, 3, 4), dtype=complex)).any()


def test_hand_built_conjugate_symmetric_spectrum_inverts():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((2, 2, 4))
    spectrum = np.fft.fft(x, axis=2)  # the forward-transform oracle
    # explicit conjugate symmetry of the hand-built spectrum
    assert np.allclose(spectrum[:, :, 1], np.conj(spectrum[:, :, 3]))
    assert np.max(np.abs(FFT.inverse(spectrum) - x)) <= 1e-12


def test_inverse_rejects_corrupted_spectrum():
    rng = np.random.default_rng(4)
    y = FFT.apply(rng.standard_normal((3, 3, 4)))
    y[0, 0, 1] += 10.0  # breaks conjugate symmetry
    with pytest.raises(TransformError):
        FFT.inverse(y)


def test_explicit_transform_validates_scaling():
    rng = np.random.default_rng(5)
    with pytest.raises(TransformError):
        Transform.explicit([rng.standard_normal((4, 4))])
    with pytest.raises(TransformError):
        Transform.explicit([rng.standard_normal((4, 3))])


def test_explicit_transform_size_binding():
    t = Transform.explicit([np.eye(4)])
    rng = np.random.default_rng(6)
    with pytest.raises(TransformError):
        t.apply(rng.standard_normal((3, 3, 5)))


# -- t-product ---------------------------------------------------------------


def test_tproduct_identity_right():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((4, 3, 5, 2))
    for t in transforms_for((5, 2), 11):
        i = identity_tensor(3, (5, 2), t)
        assert np.max(np.abs(tproduct(x, i, t) - x)) <= 1e-10


def test_tproduct_zero():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((4, 3, 5))
    assert not tproduct(x, np.zeros((3, 2, 5))).any()


def test_tube_product_is_circular_convolution():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((1, 1, 8))
    b = rng.standard_normal((1, 1, 8))
    c = tproduct(a, b).ravel()
    av, bv = a.ravel(), b.ravel()
    conv = np.array([sum(av[j] * bv[(k - j) % 8] for j in range(8)) for k in range(8)])
    assert np.max(np.abs(c - conv)) <= 1e-12


def test_tproduct_shape_errors():
    with pytest.raises(ValueError):
        tproduct(np.ones((2, 3, 4)), np.ones((2, 2, 4)))
    with pytest.raises(ValueError):
        tproduct(np.ones((2, 3, 4)), np.ones((3, 2, 5)))


def test_tproduct_associativity():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((4, 3, 5))
    y = rng.standard_normal((3, 6, 5))
    z = rng.standard_normal((6, 2, 5))
    for t in transforms_for((5,), 13):
        left = tproduct(tproduct(x, y, t), z, t)
        right = tproduct(x, tproduct(y, z, t), t)
        scale = max(np.max(np.abs(left)), 1.0)
        assert np.max(np.abs(left - right)) <= 1e-10 * scale


# -- T-SVD -------------------------------------------------------------------


def test_tsvd_identity_tensor():
    i = identity_tensor(4, (5,), FFT)
    f = tsvd(i, FFT)
    assert np.max(np.abs(f.u - i)) <= 1e-10
    assert np.max(np.abs(f.v - i)) <= 1e-10
    sl = _as_faces(FFT.apply(f.s))
    for j in range(5):
        assert np.allclose(sl[:, :, j], np.eye(4), atol=1e-10)


@pytest.mark.parametrize("dims", [(12, 9, 5, 3), (7, 11, 6)])
def test_tsvd_reconstruction(dims):
    rng = np.random.default_rng(11)
    x = rng.standard_normal(dims)
    for t in transforms_for(dims[2:], 17):
        f = tsvd(x, t)
        err = np.linalg.norm(f.reconstruct() - x) / np.linalg.norm(x)
        assert err <= 1e-10


def test_tsvd_factors_orthogonal():
    rng = np.random.default_rng(12)
    x = rng.standard_normal((5, 7, 4))
    f = tsvd(x, FFT)
    i5 = identity_tensor(5, (4,), FFT)
    i7 = identity_tensor(7, (4,), FFT)
    assert np.max(np.abs(tproduct(ttranspose(f.u, FFT), f.u, FFT) - i5)) <= 1e-8
    assert np.max(np.abs(tproduct(ttranspose(f.v, FFT), f.v, FFT) - i7)) <= 1e-8


def test_tsvd_f_diagonal_nonincreasing():
    rng = np.random.default_rng(13)
    x = rng.standard_normal((5, 6, 3, 2))
    f = tsvd(x, FFT)
    sl = _as_faces(FFT.apply(f.s))
    for j in range(sl.shape[2]):
        face = sl[:, :, j].copy()
        diag = np.real(np.diagonal(face)).copy()
        np.fill_diagonal(face, 0.0)
        assert np.max(np.abs(face)) <= 1e-10
        assert np.all(diag >= -1e-12)
        assert np.all(np.diff(diag) <= 1e-10)


def test_tsvd_rank_of_outer_product():
    rng = np.random.default_rng(14)
    a = rng.standard_normal((5, 1, 6))
    b = rng.standard_normal((7, 1, 6))
    x = tproduct(a, ttranspose(b, FFT), FFT)
    assert tsvd(x, FFT).rank == 1


def test_tsvd_deterministic():
    rng = np.random.default_rng(15)
    x = rng.standard_normal((4, 5, 3))
    f1 = tsvd(x, FFT)
    f2 = tsvd(x, FFT)
    assert np.array_equal(f1.u, f2.u)
    assert np.array_equal(f1.s, f2.s)
    assert np.array_equal(f1.v, f2.v)


def test_singular_values_invariant_under_orthogonal_tproduct():
    rng = np.random.default_rng(16)
    x = rng.standard_normal((5, 4, 6))
    q = tsvd(rng.standard_normal((5, 5, 6)), FFT).u  # orthogonal tensor
    sx = np.sort(face_singular_values(x, FFT).ravel())
    sqx = np.sort(face_singular_values(tproduct(q, x, FFT), FFT).ravel())
    assert np.max(np.abs(sx - sqx)) <= 1e-8


# -- nuclear norm ------------------------------------------------------------


def test_htnn_zero_and_identity():
    assert htnn(np.zeros((3, 3, 4))) == 0.0
    m, n = 6, 9
    assert htnn(identity_tensor(m, (n,), FFT), FFT) == pytest.approx(m, rel=1e-12)


def test_htnn_matches_bdiag_oracle():
    rng = np.random.default_rng(17)
    x = rng.standard_normal((6, 5, 4))
    for t in transforms_for((4,), 19):
        xf = _as_faces(t.apply(x))
        nuc = sum(
            np.linalg.svd(xf[:, :, j], compute_uv=False).sum() for j in range(4)
        )
        assert htnn(x, t) == pytest.approx(nuc / t.rho(x.shape), rel=1e-10)


def test_htnn_absolute_homogeneity():
    rng = np.random.default_rng(18)
    x = rng.standard_normal((4, 6, 5))
    base = htnn(x)
    for c in (-2.5, 0.3):
        assert htnn(c * x) == pytest.approx(abs(c) * base, rel=1e-10)
