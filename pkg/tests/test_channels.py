import numpy as np
import pytest

from choiscope.channels import (Channel, apply, choi_from_definition,
                                choi_to_kraus, compose, compose_choi, dual,
                                identity_channel, kraus_to_liouville,
                                liouville_to_choi, mix,
                                realign_image_identity_check, superop_hs_inner,
                                tensor_channels, transpose_channel,
                                transpose_conjugations, validate)
from choiscope.errors import NotCompletelyPositive
from choiscope.generators import (depolarizing_channel, random_cp_channel,
                                  random_state)
from choiscope.numerics import hs_inner, min_eigenvalue
from choiscope.reshape import (BipartiteShape, partial_trace_A,
                               partial_trace_B, realign, swap_operator,
                               tensor, vectorize)

from conftest import random_complex, random_density


def random_channel(seed, d_in=2, d_out=2):
    return random_cp_channel(d_in, d_out, seed)


def test_identity_channel_choi():
    ch = identity_channel(2)
    v = vectorize(np.eye(2))
    assert np.allclose(ch.choi, np.outer(v, v.conj()))
    assert abs(np.trace(ch.choi) - 2) < 1e-12


def test_transpose_channel_choi_is_swap():
    ch = transpose_channel(2)
    assert np.allclose(ch.choi, swap_operator(2))
    w = np.linalg.eigvalsh(ch.choi)
    assert abs(w[0] + 1) < 1e-10
    rep = validate(ch)
    assert rep.hermiticity_preserving and rep.trace_preserving
    assert not rep.completely_positive


def test_choi_equals_definition(rng):
    for seed in range(5):
        ch = random_channel(seed)
        assert np.allclose(ch.choi, choi_from_definition(ch.kraus_operators()),
                           atol=1e-10)


def test_kraus_roundtrip_action():
    for seed in range(10):
        ch = random_channel(seed, 3, 2)
        back = Channel.from_kraus(choi_to_kraus(ch.choi, 3, 2), d_in=3, d_out=2)
        for i in range(3):
            for j in range(3):
                E = np.zeros((3, 3), dtype=complex)
                E[i, j] = 1.0
                assert np.allclose(apply(ch, E), apply(back, E), atol=1e-8)


def test_choi_to_kraus_rejects_transpose():
    with pytest.raises(NotCompletelyPositive):
        choi_to_kraus(swap_operator(2), 2, 2)


def test_apply_routes_agree(rng):
    ch = random_channel(3, 2, 3)
    rho = random_density(rng, 2)
    out_k = apply(ch, rho, route="kraus")
    out_l = apply(ch, rho, route="liouville")
    out_c = apply(ch, rho, route="choi")
    assert np.allclose(out_k, out_l, atol=1e-10)
    assert np.allclose(out_k, out_c, atol=1e-10)


def test_cptp_choi_constraints():
    for seed in range(20):
        ch = random_channel(seed)
        D = ch.choi
        assert np.max(np.abs(D - D.conj().T)) < 1e-10
        assert min_eigenvalue(D) >= -1e-9
        # trace preservation shows up as the input-side partial trace
        assert np.allclose(partial_trace_A(D, ch.choi_shape), np.eye(2), atol=1e-9)
        assert abs(np.trace(D).real - 2) < 1e-9


def test_inner_product_transfer(rng):
    # <L_phi, L_psi> = <D_phi, D_psi>, and the action pairing via the Choi
    phi, psi = random_channel(1), random_channel(2)
    assert abs(superop_hs_inner(phi, psi)
               - hs_inner(phi.choi, psi.choi)) < 1e-9
    X = random_complex(rng, 2, 2)
    Y = random_complex(rng, 2, 2)
    lhs = hs_inner(Y, apply(phi, X))
    rhs = hs_inner(tensor(Y, X.conj()), phi.choi)
    assert abs(lhs - rhs) < 1e-9


def test_dual_adjoint_identity(rng):
    phi = random_channel(7, 2, 3)
    phi_d = dual(phi)
    X = random_complex(rng, 2, 2)
    Y = random_complex(rng, 3, 3)
    assert abs(hs_inner(Y, apply(phi, X)) - hs_inner(apply(phi_d, Y), X)) < 1e-9


def test_compose_choi_formula():
    for seed in range(10):
        a, b = random_channel(seed), random_channel(seed + 100)
        direct = compose(a, b)
        via_choi = compose_choi(a.choi, b.choi, 2)
        assert np.allclose(direct.choi, via_choi, atol=1e-9)


def test_mix_linearity_of_choi():
    a, b = random_channel(5), random_channel(6)
    m = mix([0.3, 0.7], [a, b])
    assert np.allclose(m.choi, 0.3 * a.choi + 0.7 * b.choi, atol=1e-12)


def test_half_transpose_mix_is_not_cp():
    # the equal mixture of identity and transpose sits strictly outside
    # the CP cone: its Choi operator has eigenvalue -1/2
    m = mix([0.5, 0.5], [identity_channel(2), transpose_channel(2)])
    w = np.linalg.eigvalsh(m.choi)
    assert abs(w[0] + 0.5) < 1e-10
    assert not validate(m).completely_positive


def test_boundary_mix_depolarizing_transpose():
    # 2/3 depolarizing + 1/3 transpose touches the CP boundary
    m = mix([2 / 3, 1 / 3], [depolarizing_channel(2, 1.0), transpose_channel(2)])
    w = np.linalg.eigvalsh(m.choi)
    assert abs(w[0]) < 1e-10
    kraus = choi_to_kraus(m.choi, 2, 2)
    assert len(kraus) == 3
    back = Channel.from_kraus(kraus)
    assert np.allclose(back.choi, m.choi, atol=1e-9)


def test_tensor_channels_routes_agree():
    for seed in range(10):
        a, b = random_channel(seed), random_channel(seed + 50)
        t = tensor_channels(a, b)
        kraus = [tensor(G, H) for G in a.kraus_operators()
                 for H in b.kraus_operators()]
        assert np.allclose(t.liouville, kraus_to_liouville(kraus), atol=1e-9)


def test_realign_image_identity(rng):
    # sigma = (phi (x) psi)(rho) realigns as L_phi R(rho) L_psi^T
    for seed in range(5):
        phi, psi = random_channel(seed), random_channel(seed + 10)
        rho = random_density(rng, 4)
        assert realign_image_identity_check(phi, psi, rho, atol=1e-9)


def test_realign_positivity_of_cp_pair_images(rng):
    # R(sigma) R(sigma)^dag built from CP pairs stays PSD
    shape = BipartiteShape(2, 2)
    for seed in range(10):
        phi, psi = random_channel(seed), random_channel(seed + 30)
        rho = random_density(rng, 4)
        sigma = apply(tensor_channels(phi, psi), rho)
        R = realign(sigma, shape)
        assert min_eigenvalue(R @ R.conj().T) >= -1e-9


def test_transpose_conjugations():
    for seed in range(5):
        phi = random_channel(seed)
        T = transpose_channel(2)
        both = transpose_conjugations(phi, "both")
        assert np.allclose(both.liouville,
                           compose(T, compose(phi, T)).liouville, atol=1e-12)
        left = transpose_conjugations(phi, "left")
        assert np.allclose(left.liouville, compose(T, phi).liouville, atol=1e-12)
        right = transpose_conjugations(phi, "right")
        assert np.allclose(right.liouville, compose(phi, T).liouville, atol=1e-12)


def test_validate_trace_nonincreasing():
    G = np.diag([0.5, 0.5]).astype(complex)
    sub = Channel.from_kraus([G])
    rep = validate(sub)
    assert rep.trace_nonincreasing and not rep.trace_preserving
    assert rep.completely_positive
