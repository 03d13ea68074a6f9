import numpy as np
import pytest

import freedim as fd
from conftest import make_c1m2, make_c2, make_m2, random_hermitian


def commutator_norm(Y, L):
    return float(np.linalg.norm(Y @ L - L @ Y))


# ---------------------------------------------------------------------------
# well-definedness
# ---------------------------------------------------------------------------

def test_inner_specs_are_well_defined(m2):
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(0)
    for _ in range(5):
        B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        spec = fd.inner_spec(gns, m2.generators, B)
        ok, defect, _ = fd.derivation_well_defined(gns, m2.generators, spec)
        assert ok
        assert defect <= 1e-12


def test_two_point_free_difference_quotient_obstructed(c2):
    gns = fd.gns_structure(c2)
    # oracle: X^2 = X would force P1 L_X + L_X P1 = P1, which fails
    Lx = gns.left_mult(c2.generators[0])
    obstruction = np.abs(gns.p1 @ Lx + Lx @ gns.p1 - gns.p1).max()
    assert obstruction > 1e-2

    spec = fd.DerivationSpec.free_difference_quotient(0)
    ok, defect, _ = fd.derivation_well_defined(gns, c2.generators, spec)
    assert not ok
    assert defect >= 1e-2  # decisively obstructed


def test_well_defined_map_reproduces_targets(m2):
    # the induced map sends each generator vector to its prescribed value
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(13)
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    spec = fd.inner_spec(gns, m2.generators, B)
    ok, _, dhat = fd.derivation_well_defined(gns, m2.generators, spec)
    assert ok
    t = gns.trace_vector.astype(complex)
    for X, T in zip(m2.generators, spec.targets):
        xhat = gns.left_mult(X) @ t
        assert np.linalg.norm((dhat @ xhat).reshape(4, 4) - T) <= 1e-10


def test_zero_targets_give_zero_map(c2):
    gns = fd.gns_structure(c2)
    spec = fd.DerivationSpec.from_targets([np.zeros((2, 2))])
    ok, defect, dhat = fd.derivation_well_defined(gns, c2.generators, spec)
    assert ok
    assert defect <= 1e-14
    assert np.abs(dhat).max() <= 1e-14


# ---------------------------------------------------------------------------
# conjugate vectors
# ---------------------------------------------------------------------------

def test_conjugate_inner_hermitian_matches_conjugation_formula(m2):
    # for self-adjoint B the conjugate vector is (B - J B* J) applied to 1
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(1)
    t = gns.trace_vector.astype(complex)
    for _ in range(5):
        B = random_hermitian(rng, 4)
        spec = fd.inner_spec(gns, m2.generators, B)
        xi = fd.conjugate_variable(gns, spec)
        formula = (B - B.T) @ t  # J B* J acts as the transpose matrix
        assert np.linalg.norm(xi - formula) <= 1e-10


def test_conjugate_inner_general_is_adjoint_solution(m2):
    # general B: xi solves the defining property, equivalently (B* - J B J) 1
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(2)
    t = gns.trace_vector.astype(complex)
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    spec = fd.inner_spec(gns, m2.generators, B)
    xi = fd.conjugate_variable(gns, spec)
    assert np.linalg.norm(xi - (B.conj().T - B.conj()) @ t) <= 1e-10


def test_conjugate_zero_target(c2):
    gns = fd.gns_structure(c2)
    spec = fd.DerivationSpec.from_targets([np.zeros((2, 2))])
    xi = fd.conjugate_variable(gns, spec)
    assert np.linalg.norm(xi) <= 1e-14


def test_conjugate_not_defined_for_obstructed(c2):
    gns = fd.gns_structure(c2)
    spec = fd.DerivationSpec.free_difference_quotient(0)
    assert fd.conjugate_variable(gns, spec) is None


def test_defining_property_on_word_vectors(m2):
    # <xi, Q 1> = <P1, dT(Q)>_HS checked against an independent word list
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(3)
    B = random_hermitian(rng, 4)
    spec = fd.inner_spec(gns, m2.generators, B)
    xi = fd.conjugate_variable(gns, spec)
    t = gns.trace_vector.astype(complex)
    Ls = [gns.left_mult(X) for X in m2.generators]
    words = [np.eye(4, dtype=complex)]
    for L in Ls:
        words += [L, L @ L]
    words += [Ls[0] @ Ls[1], Ls[1] @ Ls[0], Ls[0] @ Ls[1] @ Ls[0]]
    for LQ in words:
        lhs = np.vdot(LQ @ t, xi)            # <xi, Q 1>
        value = B @ LQ - LQ @ B              # dT(Q) for the inner derivation
        rhs = np.vdot(value, gns.p1)         # <P1, dT(Q)>_HS
        assert abs(lhs - rhs) <= 1e-10


# ---------------------------------------------------------------------------
# Fisher information
# ---------------------------------------------------------------------------

def test_phi_star_infinite_on_test_algebras():
    for alg in (make_c2(), make_m2(), make_c1m2()):
        assert fd.phi_star(alg) == float("inf")


def test_phi_star_defects_decisive(m2):
    rep = fd.fisher_report(m2)
    assert rep.value == float("inf")
    for slot in rep.slots:
        assert not slot.well_defined
        assert slot.defect >= 1e-2


def test_phi_star_single_generator_always_infinite():
    # one self-adjoint generator: the minimal polynomial obstructs the slot
    alg = fd.build_algebra(
        [1, 1, 1], [1 / 3, 1 / 3, 1 / 3], [np.diag([0.0, 1.0, 2.0]).astype(complex)]
    )
    assert fd.phi_star(alg) == float("inf")


def test_phi_star_regular_representation_decisive():
    alg = fd.regular_rep_algebra(fd.symmetric_group(3))
    rep = fd.fisher_report(alg)
    assert rep.value == float("inf")
    assert all(s.defect >= 1e-2 for s in rep.slots if not s.well_defined)
    assert any(not s.well_defined for s in rep.slots)


# ---------------------------------------------------------------------------
# dual operator construction
# ---------------------------------------------------------------------------

def test_dual_operator_zero_target(c2):
    gns = fd.gns_structure(c2)
    spec = fd.DerivationSpec.from_targets([np.zeros((2, 2))])
    rep = fd.construct_dual_operator(gns, spec)
    assert np.abs(rep.Y).max() <= 1e-14
    assert rep.max_residual <= 1e-14


def test_dual_operator_recovers_b_when_b_kills_trace_vector(m2):
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(4)
    t = gns.trace_vector.astype(complex)
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    B = B - np.outer(B @ t, t.conj())  # now B annihilates the trace vector
    assert np.linalg.norm(B @ t) <= 1e-12
    spec = fd.inner_spec(gns, m2.generators, B)
    rep = fd.construct_dual_operator(gns, spec)
    assert np.linalg.norm(rep.Y - B) <= 1e-10


def test_dual_operator_general_inner(m2):
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(5)
    Ls = [gns.left_mult(X) for X in m2.generators]
    for _ in range(5):
        B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        spec = fd.inner_spec(gns, m2.generators, B)
        rep = fd.construct_dual_operator(gns, spec)
        assert rep.max_residual <= 1e-9
        # Y - B commutes with every left multiplication (rank-one correction)
        for L in Ls:
            assert commutator_norm(rep.Y - B, L) <= 1e-9


def test_dual_operator_round_trip(c1m2):
    # any Y0 with Y0 1 = 0 is recovered up to the commutant
    gns = fd.gns_structure(c1m2)
    rng = np.random.default_rng(6)
    t = gns.trace_vector.astype(complex)
    D = gns.dim
    Ls = [gns.left_mult(X) for X in c1m2.generators]
    for _ in range(5):
        Y0 = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
        Y0 = Y0 - np.outer(Y0 @ t, t.conj())
        spec = fd.DerivationSpec.from_targets([Y0 @ L - L @ Y0 for L in Ls])
        rep = fd.construct_dual_operator(gns, spec)
        for L in Ls:
            assert commutator_norm(rep.Y - Y0, L) <= 1e-9


def test_dual_operator_bilinear_adjoint_identity(m2):
    # <Y Q 1, R 1> = <Q 1, Y* R 1> over all basis pairs
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(7)
    B = random_hermitian(rng, 4)
    spec = fd.inner_spec(gns, m2.generators, B)
    rep = fd.construct_dual_operator(gns, spec)
    D = gns.dim
    for q in range(D):
        for r in range(D):
            eq = np.eye(D)[q]
            er = np.eye(D)[r]
            lhs = np.vdot(er, rep.Y @ eq)
            rhs = np.vdot(rep.Y.conj().T @ er, eq)
            assert abs(lhs - rhs) <= 1e-12


def test_dual_operator_adjoint_equals_conjugate_vector(m2):
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(8)
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    spec = fd.inner_spec(gns, m2.generators, B)
    rep = fd.construct_dual_operator(gns, spec)
    xi = fd.conjugate_variable(gns, spec)
    assert np.linalg.norm(rep.Y.conj().T @ gns.trace_vector - xi) <= 1e-10
    assert rep.residual_adjoint <= 1e-10


def test_dual_operator_ill_defined_raises(c2):
    gns = fd.gns_structure(c2)
    spec = fd.DerivationSpec.free_difference_quotient(0)
    with pytest.raises(fd.IllDefined):
        fd.construct_dual_operator(gns, spec)


def test_dual_operator_residual_gate(m2):
    gns = fd.gns_structure(m2)
    rng = np.random.default_rng(9)
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    spec = fd.inner_spec(gns, m2.generators, B)
    with pytest.raises(fd.ResidualTooLarge):
        fd.construct_dual_operator(gns, spec, tol=1e-30)


# ---------------------------------------------------------------------------
# anti-symmetrization
# ---------------------------------------------------------------------------

def test_antisymmetrize_hermitian_and_skew():
    rng = np.random.default_rng(10)
    H = random_hermitian(rng, 4)
    S = 1j * random_hermitian(rng, 4)  # anti-self-adjoint
    out_h, out_s = fd.antisymmetrize([H, S])
    assert np.abs(out_h).max() <= 1e-14
    assert np.linalg.norm(out_s - S) <= 1e-14


def test_antisymmetrize_commutator_identity():
    rng = np.random.default_rng(11)
    for _ in range(10):
        Y = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        Lx = random_hermitian(rng, 5)
        assert fd.antisymmetrize_identity_residual(Y, Lx) <= 1e-12


def test_adjoint_commutator_sign_rule():
    # [Y*, L_X] = -[Y, L_X]* for self-adjoint X
    rng = np.random.default_rng(12)
    for _ in range(10):
        Y = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        Lx = random_hermitian(rng, 6)
        lhs = Y.conj().T @ Lx - Lx @ Y.conj().T
        rhs = -(Y @ Lx - Lx @ Y).conj().T
        assert np.abs(lhs - rhs).max() <= 1e-12
