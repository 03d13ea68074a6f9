from fractions import Fraction

import numpy as np

import freedim as fd
from conftest import SX, SY, SZ, make_c1m2, make_c2, make_m2

from test_vndim import joint_commutator_nullity


# ---------------------------------------------------------------------------
# the cocycle map
# ---------------------------------------------------------------------------

def test_cocycle_map_identity_vanishes(m2):
    gns = fd.gns_structure(m2)
    out = fd.cocycle_map(gns, m2.generators, np.eye(gns.dim, dtype=complex))
    assert np.abs(out).max() < 1e-14


def test_cocycle_map_kills_commutant(m2):
    # conjugated left multiplications span the commutant of the action
    gns = fd.gns_structure(m2)
    for p in range(gns.dim):
        Y = np.conj(gns.basis_left_mult[p])
        out = fd.cocycle_map(gns, m2.generators, Y)
        assert np.abs(out).max() < 1e-10


def test_cocycle_map_off_diagonal_unit(c2):
    # oracle: [Y, L_X]_{kl} = Y_{kl} (lambda_l - lambda_k) in the eigenbasis
    gns = fd.gns_structure(c2)
    Y = np.zeros((2, 2), dtype=complex)
    Y[0, 1] = 1.0
    out = fd.cocycle_map(gns, c2.generators, Y)
    expected = Y * (1.0 - 0.0)  # lambda_1 - lambda_0 at entry (0, 1)
    np.testing.assert_allclose(out[0], expected, atol=1e-12)
    assert np.linalg.norm(out[0]) > 0.9


# ---------------------------------------------------------------------------
# H0 / H1 / H2
# ---------------------------------------------------------------------------

def test_h0_two_point(c2):
    gns = fd.gns_structure(c2)
    dec = fd.central_decomposition(c2, gns)
    H0 = fd.compute_H0(gns, c2.generators)
    assert H0.complex_dim == 2
    assert fd.vn_dimension(H0, dec) == 0.5


def test_h0_m2_pair(m2):
    gns = fd.gns_structure(m2)
    dec = fd.central_decomposition(m2, gns)
    H0 = fd.compute_H0(gns, m2.generators)
    assert H0.complex_dim == 12
    assert fd.vn_dimension(H0, dec) == 0.75


def test_h0_rank_nullity_exact():
    for alg in (make_c2(), make_m2(), make_c1m2()):
        gns = fd.gns_structure(alg)
        H0 = fd.compute_H0(gns, alg.generators)
        Ls = [gns.left_mult(X) for X in alg.generators]
        D = gns.dim
        assert H0.complex_dim == D * D - joint_commutator_nullity(Ls)


def test_h0_zero_padding_leaves_dimension(m2):
    gns = fd.gns_structure(m2)
    dec = fd.central_decomposition(m2, gns)
    base = fd.vn_dimension(fd.compute_H0(gns, m2.generators), dec)
    padded_gens = list(m2.generators) + [np.zeros((2, 2), dtype=complex)]
    padded = fd.vn_dimension(fd.compute_H0(gns, padded_gens), dec)
    assert abs(base - padded) <= 1e-12


def test_h1_equals_h0(c2, m2):
    for alg in (c2, m2):
        gns = fd.gns_structure(alg)
        H0 = fd.compute_H0(gns, alg.generators)
        H1 = fd.compute_H1(gns, alg.generators)
        assert fd.subspace_distance(H0, H1) <= 1e-10


def test_h1_empty_generator_tuple(c2):
    gns = fd.gns_structure(c2)
    H1 = fd.compute_H1(gns, [])
    assert H1.complex_dim == 0


def test_h2_equals_h0_values(c2, m2, c1m2):
    for alg in (c2, m2, c1m2):
        gns = fd.gns_structure(alg)
        dec = fd.central_decomposition(alg, gns)
        H0 = fd.compute_H0(gns, alg.generators)
        H2 = fd.compute_H2(gns, alg.generators)
        assert fd.subspace_distance(H0, H2) <= 1e-12
        assert fd.vn_dimension(H0, dec) == fd.vn_dimension(H2, dec)


def test_h_spaces_invariance_certificates(c1m2):
    gns = fd.gns_structure(c1m2)
    for builder in (fd.compute_H0, fd.compute_H1, fd.compute_H2):
        K = builder(gns, c1m2.generators)
        assert K.invariance_residual <= 1e-8


# ---------------------------------------------------------------------------
# the dimension report
# ---------------------------------------------------------------------------

def test_delta_report_two_point(c2):
    rep = fd.delta_report(c2)
    assert abs(rep.Delta - 0.5) <= 1e-9
    assert abs(rep.beta0 - 0.5) <= 1e-9
    assert rep.fractions["Delta"] == Fraction(1, 2)
    assert abs(rep.closed_form_beta0 - 0.5) <= 1e-12  # (1/2)^2 + (1/2)^2


def test_delta_report_m2(m2):
    rep = fd.delta_report(m2)
    assert abs(rep.Delta - 0.75) <= 1e-9
    assert abs(rep.beta0 - 0.25) <= 1e-9
    assert abs(rep.closed_form_beta0 - 0.25) <= 1e-12  # 1 / 2^2


def test_delta_report_direct_sum(c1m2):
    rep = fd.delta_report(c1m2)
    assert abs(rep.Delta - 7 / 9) <= 1e-9
    assert rep.fractions["Delta"] == Fraction(7, 9)
    # closed form (1/3)^2 + (2/3)^2 / 4 = 2/9
    assert abs(rep.closed_form_beta0 - 2 / 9) <= 1e-12
    assert rep.fractions["closed_form_beta0"] == Fraction(2, 9)


def test_delta_chain_and_pinning(c1m2):
    rep = fd.delta_report(c1m2)
    assert rep.pinned
    assert rep.delta_star == rep.Delta == rep.delta_blackstar
    assert rep.dim_H0 <= rep.dim_H2 + 1e-9
    assert rep.agreement["spaces_coincide"]
    assert rep.agreement["closed_form_matches"]
    assert rep.agreement["weak_equals_norm"]


def test_generator_independence_same_algebra():
    # different generating tuples (and lengths) of M_2 give the same Delta
    tuples = [
        [SX.copy(), SZ.copy()],
        [SY.copy(), SZ.copy()],
        [SX.copy(), SY.copy(), SZ.copy()],
        [(SX + SZ) / np.sqrt(2), SY.copy()],
    ]
    values = []
    for gens in tuples:
        alg = fd.build_algebra([2], [1.0], gens)
        values.append(fd.delta_report(alg).Delta)
    for v in values[1:]:
        assert abs(v - values[0]) <= 1e-9


def test_delta_bounds(c2, m2, c1m2):
    for alg in (c2, m2, c1m2):
        rep = fd.delta_report(alg)
        n = alg.n_generators
        assert -1e-12 <= rep.Delta <= min(n, 1) + 1e-12


def test_subalgebra_mode_delta():
    # a non-generating tuple works through its generated subalgebra
    sub = fd.build_algebra([2], [1.0], [SX.copy()], subalgebra_mode=True)
    rep = fd.delta_report(sub)
    assert abs(rep.Delta - 0.5) <= 1e-9  # effective algebra is C^2, w = (1/2, 1/2)


def test_subalgebra_mode_with_multiplicity():
    # the diagonal copy {a (+) a} inside M_2 (+) M_2 sits with multiplicity 2;
    # its own block form is a single 2x2 block of full weight
    def dbl(m):
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = m
        out[2:, 2:] = m
        return out

    sub = fd.build_algebra(
        [2, 2], [0.3, 0.7], [dbl(SX), dbl(SZ)], subalgebra_mode=True
    )
    assert sub.generated_dim == 4
    eff = sub.effective_algebra()
    assert eff.block_sizes == (2,)
    np.testing.assert_allclose(eff.trace_weights, [1.0], atol=1e-12)
    rep = fd.delta_report(sub)
    assert rep.fractions["Delta"] == Fraction(3, 4)


def test_delta_report_extreme_weights():
    g1 = np.zeros((3, 3), dtype=complex)
    g1[0, 0] = 1.0
    g1[1:, 1:] = SX
    g2 = np.zeros((3, 3), dtype=complex)
    g2[1:, 1:] = SZ
    alg = fd.build_algebra([1, 2], [0.999, 0.001], [g1, g2])
    rep = fd.delta_report(alg)
    expected = 1.0 - (0.999**2 + 0.001**2 / 4.0)
    assert abs(rep.Delta - expected) <= 1e-9
    assert rep.agreement["closed_form_matches"]


def test_delta_chain_property(c2):
    rep = fd.delta_report(c2)
    chain = rep.delta_chain
    assert chain["status"] == "pinned"
    assert chain["lower_bound"] <= chain["delta_star"] <= chain["upper_bound"]
