import numpy as np
import pytest

from choiscope.bsa import (ProductVector, bipartite_choi, bsa_operation,
                           bsa_state, candidate_products,
                           choi_regroup_permutation, is_separable_operation,
                           kraus_factor_split, max_lambda,
                           max_lambda_bisection, max_pair, osa_fixed_set)
from choiscope.channels import Channel, identity_channel, mix
from choiscope.errors import CandidateOutsideRange, NotAState
from choiscope.generators import (depolarizing_channel, random_cp_channel,
                                  random_product_mixture, swap_channel,
                                  werner_state)
from choiscope.reshape import (BipartiteShape, swap_operator, tensor,
                               tensor_vectors, vectorize)

from conftest import random_complex, random_density

SH22 = BipartiteShape(2, 2)
E0 = np.array([1, 0], dtype=complex)
E1 = np.array([0, 1], dtype=complex)
SINGLET = (tensor_vectors(E0, E1) - tensor_vectors(E1, E0)) / np.sqrt(2)


def test_max_lambda_anchors(rng):
    psi = random_complex(rng, 4)
    psi /= np.linalg.norm(psi)
    P = np.outer(psi, psi.conj())
    assert abs(max_lambda(P, psi) - 1.0) < 1e-12
    assert abs(max_lambda(np.eye(4) / 4, psi) - 0.25) < 1e-12
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    assert max_lambda(rho, np.array([0, 0, 1, 0], dtype=complex)) == 0.0


def test_max_lambda_matches_bisection(rng):
    for d in (4, 9):
        for _ in range(20):
            rho = random_density(rng, d)
            psi = random_complex(rng, d)
            assert abs(max_lambda(rho, psi)
                       - max_lambda_bisection(rho, psi)) < 1e-8


def test_max_lambda_rejects_non_states(rng):
    psi = np.array([1, 0, 0, 0], dtype=complex)
    with pytest.raises(NotAState):
        max_lambda(np.diag([1.0, -0.5, 0, 0]), psi)
    with pytest.raises(NotAState):
        max_lambda(random_complex(rng, 4, 4), psi)


def test_max_pair_mutual_maximality(rng):
    rho = random_density(rng, 4)
    psi1 = random_complex(rng, 4)
    psi1 /= np.linalg.norm(psi1)
    psi2 = random_complex(rng, 4)
    psi2 /= np.linalg.norm(psi2)
    l1, l2 = max_pair(rho, psi1, psi2)
    P1 = np.outer(psi1, psi1.conj())
    P2 = np.outer(psi2, psi2.conj())
    assert abs(l1 - max_lambda(rho - l2 * P2, psi1)) < 1e-6
    assert abs(l2 - max_lambda(rho - l1 * P1, psi2)) < 1e-6
    assert np.linalg.eigvalsh(rho - l1 * P1 - l2 * P2)[0] >= -1e-8


def test_max_pair_against_grid_scan(rng):
    rho = random_density(rng, 4)
    psi1 = random_complex(rng, 4)
    psi1 /= np.linalg.norm(psi1)
    psi2 = random_complex(rng, 4)
    psi2 /= np.linalg.norm(psi2)
    l1, l2 = max_pair(rho, psi1, psi2)
    P1 = np.outer(psi1, psi1.conj())
    P2 = np.outer(psi2, psi2.conj())
    hi1 = max_lambda(rho, psi1)
    hi2 = max_lambda(rho, psi2)
    best = 0.0
    for a in np.linspace(0, hi1, 200):
        for b in np.linspace(0, hi2, 200):
            if a + b > best and np.linalg.eigvalsh(rho - a * P1 - b * P2)[0] >= -1e-9:
                best = a + b
    assert l1 + l2 >= best - 1e-2 * max(best, 1.0)


def test_max_pair_rejects_equal_projectors():
    psi = np.array([1, 0, 0, 0], dtype=complex)
    with pytest.raises(ValueError):
        max_pair(np.eye(4) / 4, psi, psi)


def test_candidate_products_full_range_count():
    V = candidate_products(np.eye(4, dtype=complex) / 4, SH22, 30, seed=0)
    assert len(V) == 30
    for pv in V:
        assert abs(np.linalg.norm(pv.vector) - 1) < 1e-12


def test_candidate_products_restricted_range():
    v1 = tensor_vectors(E0, E0)
    v2 = tensor_vectors(E1, E1)
    rho = 0.5 * np.outer(v1, v1.conj()) + 0.5 * np.outer(v2, v2.conj())
    V = candidate_products(rho, SH22, 20, seed=1)
    assert 1 <= len(V) <= 2
    for pv in V:
        best = max(abs(np.vdot(pv.vector, v1)) ** 2,
                   abs(np.vdot(pv.vector, v2)) ** 2)
        assert best > 1 - 1e-6


def test_osa_two_term_diagonal():
    v1 = tensor_vectors(E0, E0)
    v2 = tensor_vectors(E1, E1)
    rho = 0.5 * np.outer(v1, v1.conj()) + 0.5 * np.outer(v2, v2.conj())
    dec = osa_fixed_set(rho, [ProductVector(E0, E0), ProductVector(E1, E1)])
    assert dec.lambda_total > 1 - 1e-9
    assert np.linalg.norm(dec.residual) < 1e-8


def test_osa_empty_set_on_singlet():
    rho = np.outer(SINGLET, SINGLET.conj())
    dec = osa_fixed_set(rho, [])
    assert dec.lambda_total == 0.0
    assert np.allclose(dec.residual, rho)


def test_osa_rejects_out_of_range_candidates():
    rho = np.outer(SINGLET, SINGLET.conj())
    with pytest.raises(CandidateOutsideRange):
        osa_fixed_set(rho, [ProductVector(E0, E0)])


def test_osa_invariants(rng):
    rho = random_density(rng, 4)
    V = candidate_products(rho, SH22, 40, seed=2)
    trace = []
    dec = osa_fixed_set(rho, V, seed=3, trace=trace)
    # total nondecreasing across sweeps, residual PSD
    assert all(b - a >= -1e-10 for a, b in zip(trace, trace[1:]))
    assert np.linalg.eigvalsh(dec.residual)[0] >= -1e-8
    # every weight is singly maximal against its own complement
    for lam, pv in dec.terms:
        rho_a = dec.residual + lam * pv.projector
        assert abs(lam - max_lambda(rho_a, pv.vector)) < 1e-7


def test_osa_monotone_under_set_growth(rng):
    rho = random_density(rng, 4)
    V = candidate_products(rho, SH22, 30, seed=4)
    small = osa_fixed_set(rho, V[:10], seed=5)
    large = osa_fixed_set(rho, V, seed=5)
    assert large.lambda_total >= small.lambda_total - 1e-9


def test_bsa_state_pure_shortcuts():
    rho_prod = np.outer(tensor_vectors(E0, E1), tensor_vectors(E0, E1).conj())
    dec = bsa_state(rho_prod, SH22, budget=20, seed=0)
    assert dec.lambda_total == 1.0
    assert np.linalg.norm(dec.residual) < 1e-12
    rho_ent = np.outer(SINGLET, SINGLET.conj())
    dec = bsa_state(rho_ent, SH22, budget=20, seed=0)
    assert dec.lambda_total == 0.0
    assert np.allclose(dec.residual, rho_ent)


def test_bsa_state_rejects_unnormalized():
    with pytest.raises(NotAState):
        bsa_state(np.eye(4, dtype=complex), SH22, budget=10, seed=0)
    with pytest.raises(NotAState):
        bsa_state(np.zeros((4, 4)), SH22, budget=10, seed=0)


def test_bsa_state_separable_mixture():
    rho = random_product_mixture(2, 2, 6, seed=42)
    dec = bsa_state(rho, SH22, budget=150, seed=0)
    assert dec.lambda_total >= 0.99
    recon = dec.lambda_total * dec.separable_part + dec.residual
    assert np.allclose(recon, rho, atol=1e-8)


def test_bsa_state_werner_value():
    dec = bsa_state(werner_state(0.5), SH22, budget=200, seed=1)
    # exact value for this family is 3(1-p)/2
    assert abs(dec.lambda_total - 0.75) < 5e-3


def test_bipartite_choi_is_permuted_choi(rng):
    P = choi_regroup_permutation(2)
    for seed in range(10):
        ch = random_cp_channel(4, 4, seed)
        ops = ch.kraus_operators()
        assert np.max(np.abs(bipartite_choi(ops, 2) - P @ ch.choi @ P)) < 1e-10
    ops = [random_complex(rng, 4, 4)]
    assert np.allclose(bipartite_choi(ops, 2, normalized=True),
                       bipartite_choi(ops, 2) / 4, atol=1e-12)


def test_bipartite_choi_identity_dyad():
    E = bipartite_choi([np.eye(4)], 2)
    w = vectorize(np.eye(4))
    P = choi_regroup_permutation(2)
    assert np.allclose(E, np.outer(P @ w, (P @ w).conj()), atol=1e-12)


def test_kraus_factor_split_examples(rng):
    S = swap_operator(2).astype(complex)
    prod, rest = kraus_factor_split([np.eye(4) / np.sqrt(2), S / np.sqrt(2)], SH22)
    assert len(prod) == 1 and len(rest) == 1
    assert np.allclose(prod[0], np.eye(4) / np.sqrt(2))
    all_prod = [tensor(random_complex(rng, 2, 2), random_complex(rng, 2, 2))
                for _ in range(3)]
    prod, rest = kraus_factor_split(all_prod, SH22)
    assert len(prod) == 3 and not rest


def test_bsa_operation_identity():
    res = bsa_operation(identity_channel(4), 2, budget=50, seed=0)
    assert abs(res.lam - 1.0) < 1e-10
    assert np.linalg.norm(res.ent_part.choi) < 1e-10
    assert np.allclose(res.bsa_part.choi + res.ent_part.choi,
                       identity_channel(4).choi, atol=1e-8)


def test_bsa_operation_product_kraus(rng):
    ops = [tensor(random_complex(rng, 2, 2), random_complex(rng, 2, 2))
           for _ in range(3)]
    ch = Channel.from_kraus(ops)
    res = bsa_operation(ch, 2, budget=200, seed=0)
    assert (np.linalg.norm(res.ent_part.choi)
            <= 1e-2 * np.linalg.norm(ch.choi))


def test_bsa_operation_swap_bounded_by_state_value():
    ch = swap_channel(2)
    res = bsa_operation(ch, 2, budget=50, seed=0)
    P = choi_regroup_permutation(2)
    rho = P @ ch.choi @ P / np.trace(ch.choi).real
    state_dec = bsa_state(rho, BipartiteShape(4, 4), budget=50, seed=0)
    assert res.lam <= state_dec.lambda_total + 1e-9


def test_separability_verdicts(rng):
    U = np.linalg.qr(random_complex(rng, 2, 2))[0]
    W = np.linalg.qr(random_complex(rng, 2, 2))[0]
    local = Channel.from_kraus([tensor(U, W)])
    assert is_separable_operation(local, 2, budget=50, seed=0).kind == "separable"
    assert is_separable_operation(swap_channel(2), 2, budget=50, seed=0).kind == "entangled"
    weak = mix([1e-3, 1 - 1e-3],
               [swap_channel(2), depolarizing_channel(4, 1.0)])
    verdict = is_separable_operation(weak, 2, budget=20, seed=0)
    assert verdict.kind == "inconclusive"
