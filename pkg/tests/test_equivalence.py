"""Tests for the equivalence decisions, certificates, and paths."""

import numpy as np
import pytest

from amok import algebra, equivalence as eqv, model, rand
from amok.errors import PredicateFailure, SourceMismatch, Unsupported

M2 = algebra.AlgebraSpec.fd([2])
FD23 = algebra.AlgebraSpec.fd([2, 3])
CIRCLE1 = algebra.AlgebraSpec.circle(1, 64)


def fd_element(spec, *mats):
    mats = [np.asarray(m, dtype=complex) for m in mats]
    d0 = spec.block_dims[0]
    m = mats[0].shape[0] // d0
    n = mats[0].shape[1] // d0
    return algebra.Element(spec, m, n, tuple(mats))


def det_oracle(a):
    """Determinant by cofactor expansion (independent of the library
    and of numpy's LU-based det)."""
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += ((-1) ** j) * a[0, j] * det_oracle(minor)
    return total


def winding_oracle(u):
    """Argument-principle winding of det(u(z)) over the sample loop."""
    dets = np.array([det_oracle(a) for a in u.data])
    phases = np.angle(dets)
    increments = np.diff(np.concatenate([phases, phases[:1]]))
    increments = (increments + np.pi) % (2 * np.pi) - np.pi
    total = increments.sum()
    w = total / (2 * np.pi)
    assert abs(w - round(w)) < 1e-6
    return int(round(w))


P10 = fd_element(M2, np.diag([1.0, 0.0]))
P01 = fd_element(M2, np.diag([0.0, 1.0]))
E = algebra.order_unit(M2, 1)
E2 = algebra.order_unit(M2, 2)


# -- projection equivalence ------------------------------------------------

def test_mvn_reflexive_with_self_witness():
    ok, cert = eqv.mvn_equivalent(P10, P10)
    assert ok
    assert cert.validate()
    assert model.distance(model.abs_value(cert.witness), P10) <= 1e-9


def test_mvn_rank_equal_projections():
    ok, cert = eqv.mvn_equivalent(P10, P01)
    assert ok
    assert cert.validate()
    # the witness is a matrix unit up to phase: |v| = p, |v*| = q
    assert model.distance(model.abs_value(cert.witness), P10) <= 1e-9
    assert model.distance(model.abs_value(cert.witness.adjoint()), P01) <= 1e-9


def test_mvn_rank_distinct_is_false():
    ok, cert = eqv.mvn_equivalent(P10, E)
    assert not ok
    assert cert is None
    # independent rank oracle agrees
    assert np.linalg.matrix_rank(P10.data[0]) != np.linalg.matrix_rank(E.data[0])


def test_mvn_random_conjugates_always_equivalent():
    rng = rand.stream(200, 0)
    for alg in (FD23, CIRCLE1):
        for _ in range(5):
            p = rand.projection(rng, alg, 2)
            q = rand.projection(rng, alg, 2)
            ok, cert = eqv.mvn_equivalent(p, q)
            want = eqv.proj_invariant(p) == eqv.proj_invariant(q)
            assert ok == want
            if ok:
                assert cert.validate()


def test_stabilized_equiv_matches_and_pads():
    z = algebra.zero(M2, 1)
    ok, cert = eqv.stabilized_projection_equiv(P10, algebra.direct_sum(P10, z))
    assert ok and cert.validate()
    ok, cert = eqv.stabilized_projection_equiv(P10, P01)
    assert ok and cert.validate()
    ok, cert = eqv.stabilized_projection_equiv(P10, E)
    assert not ok and cert is None


def test_mvn_compatibility_with_sums():
    rng = rand.stream(201, 0)
    p = rand.projection(rng, M2, 1, ranks=[1])
    q = rand.projection(rng, M2, 1, ranks=[1])
    ok, cert = eqv.mvn_equivalent(algebra.direct_sum(p, q),
                                  algebra.direct_sum(q, p))
    assert ok and cert.validate()


def test_orthogonal_projection_sum_equivalent_to_direct_sum():
    p = P10
    q = P01
    assert model.orthogonal(p, q)
    s = p + q
    ok, cert = eqv.mvn_equivalent(s, algebra.direct_sum(p, q))
    assert ok and cert.validate()


# -- condition (T) transport -----------------------------------------------

def make_cert(v):
    return eqv.PartialIsometryCertificate(
        witness=v, source=model.abs_value(v),
        target=model.abs_value(v.adjoint()))


def test_transport_of_self():
    e12 = fd_element(M2, [[0, 1], [0, 0]])
    u = make_cert(e12)
    w = eqv.condition_T_transport(u, u)
    assert w.validate()
    target = model.abs_value(e12.adjoint())
    assert model.distance(model.abs_value(w.witness), target) <= 1e-9
    assert model.distance(model.abs_value(w.witness.adjoint()), target) <= 1e-9


def test_transport_matrix_unit_with_source_projection():
    e12 = fd_element(M2, [[0, 1], [0, 0]])
    u = make_cert(e12)
    v = make_cert(P01)  # |q| = |q*| = q = source of e12
    w = eqv.condition_T_transport(u, v)
    assert w.validate()
    assert model.distance(model.abs_value(w.witness.adjoint()),
                          model.abs_value(e12.adjoint())) <= 1e-9


def test_transport_random_shared_source():
    rng = rand.stream(202, 0)
    for alg in (FD23, CIRCLE1):
        for _ in range(5):
            p = rand.projection(rng, alg, 2)
            a = rand.unitary(rng, alg, 2).matmul(p)
            b = rand.unitary(rng, alg, 2).matmul(p)
            w = eqv.condition_T_transport(make_cert(a), make_cert(b))
            assert w.validate()


def test_transport_rejects_mismatched_sources():
    u = make_cert(P10)
    v = make_cert(P01)
    with pytest.raises(SourceMismatch):
        eqv.condition_T_transport(u, v)


# -- unitary homotopy ------------------------------------------------------

def test_homotopic_to_self_constant_invariants():
    rng = rand.stream(203, 0)
    for alg in (M2, CIRCLE1):
        u = rand.unitary(rng, alg, 2)
        ok, path = eqv.homotopic_unitaries(u, u)
        assert ok
        assert path.validate()
        assert model.distance(path.start, u) <= 1e-9
        assert model.distance(path.end, u) <= 1e-9


def test_fd_unitaries_always_homotopic():
    minus = fd_element(M2, np.diag([-1.0, -1.0]))
    ok, path = eqv.homotopic_unitaries(E, minus)
    assert ok
    assert len(path.samples) == eqv.PATH_SAMPLES
    path.validate_strict()
    assert model.distance(path.start, E) <= 1e-8
    assert model.distance(path.end, minus) <= 1e-8


def test_circle_winding_separates_classes():
    z = algebra.circle_function(CIRCLE1, 1, 1,
                                lambda z: np.array([[z]], dtype=complex))
    one = algebra.order_unit(CIRCLE1, 1)
    ok, path = eqv.homotopic_unitaries(z, one)
    assert not ok and path is None
    assert winding_oracle(z) == 1
    assert winding_oracle(one) == 0
    assert eqv.winding(z) == 1
    assert eqv.winding(one) == 0


def test_winding_matches_oracle_on_twisted_unitaries():
    rng = rand.stream(204, 0)
    for w in (-2, -1, 0, 1, 2):
        u = rand.unitary(rng, CIRCLE1, 2, winding=w)
        assert eqv.winding(u) == w
        assert winding_oracle(u) == w


def test_circle_equal_winding_gives_validated_path():
    rng = rand.stream(205, 0)
    u = rand.unitary(rng, CIRCLE1, 2, winding=1)
    v = rand.unitary(rng, CIRCLE1, 2, winding=1)
    ok, path = eqv.homotopic_unitaries(u, v)
    assert ok
    path.validate_strict()
    assert model.distance(path.start, u) <= 1e-8
    assert model.distance(path.end, v) <= 1e-8


# -- padded / stabilized unitary relations ---------------------------------

def test_sim1_absorbs_order_unit():
    rng = rand.stream(206, 0)
    for alg in (M2, CIRCLE1):
        u = rand.unitary(rng, alg, 1)
        padded = algebra.direct_sum(u, algebra.order_unit(alg, 1))
        ok, _ = eqv.sim1_equivalent(u, padded)
        assert ok


def test_sim1_swaps_summands():
    rng = rand.stream(207, 0)
    u = rand.unitary(rng, M2, 1)
    v = rand.unitary(rng, M2, 1)
    ok, _ = eqv.sim1_equivalent(algebra.direct_sum(u, v),
                                algebra.direct_sum(v, u))
    assert ok


def test_sim1_circle_winding_distinct():
    z1 = algebra.circle_function(CIRCLE1, 1, 1,
                                 lambda z: np.array([[z]], dtype=complex))
    z2 = algebra.circle_function(CIRCLE1, 1, 1,
                                 lambda z: np.array([[z * z]], dtype=complex))
    ok, _ = eqv.sim1_equivalent(z1, z2)
    assert not ok


def test_approx1_matches_sim1_and_padding():
    rng = rand.stream(208, 0)
    for alg in (M2, CIRCLE1):
        for t in range(5):
            u = rand.unitary(rand.stream(208, 2 * t), alg, 1)
            v = rand.unitary(rand.stream(208, 2 * t + 1), alg, 1)
            w = rand.unitary(rng, alg, 2)
            lhs, _ = eqv.sim1_equivalent(algebra.direct_sum(u, w),
                                         algebra.direct_sum(v, w))
            rhs, _ = eqv.approx1_equivalent(u, v)
            assert lhs == rhs
        u = rand.unitary(rng, alg, 1)
        ok, _ = eqv.approx1_equivalent(
            u, algebra.direct_sum(u, algebra.order_unit(alg, 1)))
        assert ok


# -- partial-unitary homotopy ----------------------------------------------

def test_zero_homotopic_to_zero():
    z = algebra.zero(M2, 2)
    ok, path = eqv.homotopic_partial_unitaries(z, z)
    assert ok
    path.validate_strict()
    for s in path.samples:
        assert model.distance(s, z) <= 1e-9


def test_flip_homotopic_to_unit():
    flip = fd_element(M2, [[0, 1], [1, 0]])
    assert model.classify(flip).is_partial_unitary
    ok, path = eqv.homotopic_partial_unitaries(flip, E)
    assert ok
    path.validate_strict()
    assert model.distance(path.start, flip) <= 1e-8
    assert model.distance(path.end, E) <= 1e-8


def test_rank_distinct_partial_unitaries_not_homotopic():
    e11 = fd_element(M2, np.diag([1.0, 0.0]))
    ok, path = eqv.homotopic_partial_unitaries(e11, E)
    assert not ok and path is None


def test_fd_random_equal_rank_partial_unitaries():
    for t in range(5):
        rng = rand.stream(209, t)
        ranks = [int(rng.integers(0, 5)), int(rng.integers(0, 7))]
        u = rand.partial_unitary(rng, FD23, 2, ranks=ranks)
        v = rand.partial_unitary(rng, FD23, 2, ranks=ranks)
        ok, path = eqv.homotopic_partial_unitaries(u, v)
        assert ok
        path.validate_strict()
        assert model.distance(path.start, u) <= 1e-8
        assert model.distance(path.end, v) <= 1e-8


def test_circle_mixed_rank_unsupported():
    rng = rand.stream(210, 0)
    u = rand.partial_unitary(rng, CIRCLE1, 2, ranks=1)
    v = rand.partial_unitary(rng, CIRCLE1, 2, ranks=1)
    with pytest.raises(Unsupported):
        eqv.homotopic_partial_unitaries(u, v)


def test_simk_absorbs_zero_padding():
    rng = rand.stream(211, 0)
    u = rand.partial_unitary(rng, M2, 1)
    ok, _ = eqv.simK_equivalent(u, algebra.direct_sum(u, algebra.zero(M2, 1)))
    assert ok


def test_simk_swaps_summands():
    rng = rand.stream(212, 0)
    u = rand.partial_unitary(rng, M2, 1)
    v = rand.partial_unitary(rng, M2, 1)
    ok, _ = eqv.simK_equivalent(algebra.direct_sum(u, v),
                                algebra.direct_sum(v, u))
    assert ok


def test_simk_rank_distinct_false():
    e11 = fd_element(M2, np.diag([1.0, 0.0]))
    ok, _ = eqv.simK_equivalent(e11, algebra.direct_sum(e11, e11))
    assert not ok


def test_approxk_matches_simk():
    for t in range(5):
        rng = rand.stream(213, t)
        u = rand.partial_unitary(rng, FD23, 1)
        v = rand.partial_unitary(rng, FD23, 1)
        w = rand.partial_unitary(rng, FD23, 1)
        lhs, _ = eqv.simK_equivalent(algebra.direct_sum(u, w),
                                     algebra.direct_sum(v, w))
        rhs, _ = eqv.approxK_equivalent(u, v)
        assert lhs == rhs
    rng = rand.stream(213, 100)
    u = rand.partial_unitary(rng, M2, 1)
    ok, _ = eqv.approxK_equivalent(u, algebra.direct_sum(u, algebra.zero(M2, 1)))
    assert ok


# -- equivalence-relation laws and cancellation ----------------------------

def test_relation_laws_on_random_triples():
    for t in range(3):
        rng = rand.stream(214, t)
        us = [rand.unitary(rng, FD23, 1) for _ in range(3)]
        for u in us:
            ok, _ = eqv.sim1_equivalent(u, u)
            assert ok
        ab, _ = eqv.sim1_equivalent(us[0], us[1])
        ba, _ = eqv.sim1_equivalent(us[1], us[0])
        assert ab == ba
        bc, _ = eqv.sim1_equivalent(us[1], us[2])
        ac, _ = eqv.sim1_equivalent(us[0], us[2])
        if ab and bc:
            assert ac
        vs = [rand.partial_unitary(rng, FD23, 1) for _ in range(3)]
        for v in vs:
            ok, _ = eqv.simK_equivalent(v, v)
            assert ok
        ab, _ = eqv.simK_equivalent(vs[0], vs[1])
        ba, _ = eqv.simK_equivalent(vs[1], vs[0])
        assert ab == ba


def test_invariant_cancellation():
    for t in range(10):
        rng = rand.stream(215, t)
        u = rand.partial_unitary(rng, FD23, 1)
        v = rand.partial_unitary(rng, FD23, 1)
        w = rand.partial_unitary(rng, FD23, 1)
        sums_equal = (eqv.support_invariant(algebra.direct_sum(u, w))
                      == eqv.support_invariant(algebra.direct_sum(v, w)))
        parts_equal = eqv.support_invariant(u) == eqv.support_invariant(v)
        assert sums_equal == parts_equal


# -- derived paths ---------------------------------------------------------

def test_transfer_of_constant_path():
    rng = rand.stream(216, 0)
    u = rand.partial_unitary(rng, M2, 2)
    path = eqv.HomotopyPath(samples=(u, u, u),
                            relation_domain=eqv.PARTIAL_UNITARY_SET)
    proj_path, (plus_path, minus_path) = eqv.abs_homotopy_transfer(path)
    a = model.abs_value(u)
    for s in proj_path.samples:
        assert model.distance(s, a) <= 1e-9
    e = algebra.order_unit(M2, 2)
    for s in plus_path.samples:
        assert model.distance(s, u + (e - a)) <= 1e-9
    for s in minus_path.samples:
        assert model.distance(s, u - (e - a)) <= 1e-9


def test_transfer_of_partial_unitary_path():
    rng = rand.stream(217, 0)
    u = rand.partial_unitary(rng, FD23, 1, ranks=[1, 2])
    v = rand.partial_unitary(rng, FD23, 1, ranks=[1, 2])
    ok, path = eqv.homotopic_partial_unitaries(u, v)
    assert ok
    proj_path, (plus_path, minus_path) = eqv.abs_homotopy_transfer(path)
    # projection path keeps the rank constant at every sample
    start_inv = eqv.proj_invariant(proj_path.samples[0])
    for s in proj_path.samples:
        assert eqv.proj_invariant(s) == start_inv
    # derived unitary paths pass their predicate everywhere
    for p in (plus_path, minus_path):
        for s in p.samples[:: max(1, len(p.samples) // 8)]:
            assert model.is_unitary(s, 1e-7)


def test_path_validator_catches_bad_samples():
    rng = rand.stream(218, 0)
    u = rand.unitary(rng, M2, 1)
    broken = eqv.HomotopyPath(samples=(u, u.scale(2.0), u),
                              relation_domain=eqv.UNITARY_SET)
    with pytest.raises(PredicateFailure):
        broken.validate_strict()
    assert not broken.validate()
