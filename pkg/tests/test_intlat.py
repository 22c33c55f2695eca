import random

import pytest

from k3lat import intlat
from k3lat import matrices as mx
from k3lat.errors import DegenerateEmbeddingError, LatticeError, NotIsotropicError, RankMismatchError
from k3lat.intlat import (
    IntegralLattice,
    direct_sum,
    enumerate_vectors,
    hyperbolic_plane,
    identity_embedding,
    index_of_sublattice,
    is_primitive_sublattice,
    orthogonal_complement,
    polarization_lattice,
    quotient_by_isotropic,
    rank_one,
    saturation,
    sublattice,
)


def test_lattice_basics():
    u = hyperbolic_plane()
    assert u.det == -1
    assert u.is_even
    lam2 = polarization_lattice(1)
    assert lam2.det == -2
    assert lam2.norm((0, 1, 1)) == 2
    assert lam2.pairing((0, 1, 1), (1, 0, 0)) == 0
    with pytest.raises(LatticeError):
        IntegralLattice(((0, 1), (2, 0)))


def test_is_primitive_sublattice():
    lam10 = polarization_lattice(5)
    e = sublattice(lam10, [(0, 1, 1), (1, 2, -2)])
    assert e.source.gram == ((2, 0), (0, 2))
    assert is_primitive_sublattice(e)

    lam2 = polarization_lattice(1)
    e2 = sublattice(lam2, [(0, 2, 0)])
    assert not is_primitive_sublattice(e2)

    assert is_primitive_sublattice(identity_embedding(lam2))

    degenerate = intlat.SublatticeEmbedding(
        IntegralLattice(((0,),)), hyperbolic_plane(), ((0,), (0,))
    )
    with pytest.raises(DegenerateEmbeddingError):
        is_primitive_sublattice(degenerate)


def test_orthogonal_complement_examples():
    lam2 = polarization_lattice(1)
    c = orthogonal_complement(lam2, [(0, 1, 1), (1, 0, 0)])
    assert c.source.gram == ((-2,),)
    assert c.columns() == [(0, 1, -1)]

    u = hyperbolic_plane()
    c2 = orthogonal_complement(u, [(1, 0)])
    assert c2.source.gram == ((0,),)
    assert c2.columns() == [(1, 0)]

    c3 = orthogonal_complement(lam2, [])
    assert c3.matrix == mx.identity(3)


def test_saturation():
    lam2 = polarization_lattice(1)
    e = sublattice(lam2, [(0, 2, 0)])
    s = saturation(e)
    assert s.columns() == [(0, 1, 0)]
    assert is_primitive_sublattice(s)

    prim = sublattice(lam2, [(0, 1, 1), (1, 0, 0)])
    assert saturation(prim) is prim

    e2 = sublattice(lam2, [(2, 0, 0), (0, 2, 0)])
    s2 = saturation(e2)
    assert s2.columns() == [(1, 0, 0), (0, 1, 0)]
    assert saturation(s2) is s2


def test_index_of_sublattice():
    # Zv + v_perp inside N(X) for NS = [[2]], v = (1, 0, -1) in Mukai coords.
    n_lattice = IntegralLattice(((2, 0, 0), (0, 0, -1), (0, -1, 0)))
    v = (0, 1, -1)
    perp = orthogonal_complement(n_lattice, [v])
    cols = [v] + perp.columns()
    full = sublattice(n_lattice, cols)
    assert index_of_sublattice(n_lattice, full) == 2

    lam2 = polarization_lattice(1)
    assert index_of_sublattice(lam2, identity_embedding(lam2)) == 1

    doubled = sublattice(lam2, [(2, 0, 0), (0, 2, 0), (0, 0, 2)])
    assert index_of_sublattice(lam2, doubled) == 8

    with pytest.raises(RankMismatchError):
        index_of_sublattice(lam2, sublattice(lam2, [(1, 0, 0)]))


def test_quotient_by_isotropic_examples():
    l1 = direct_sum(hyperbolic_plane(), rank_one(2))
    q = quotient_by_isotropic(l1, (1, 0, 0))
    assert q.gram == ((2,),)

    u = hyperbolic_plane()
    q2 = quotient_by_isotropic(u, (1, 0))
    assert q2.rank == 0
    assert q2.det == 1

    with pytest.raises(NotIsotropicError):
        quotient_by_isotropic(u, (2, 0))
    with pytest.raises(NotIsotropicError):
        quotient_by_isotropic(u, (1, 1))


def test_quotient_determinant_basis_independent():
    # Twisted-shape lattice: NS = [[2]], alpha^2 = -2, r = 5.
    twisted = IntegralLattice(((-2, -5, 0), (-5, 0, 0), (0, 0, 2)))
    v = (1, 0, 1)
    assert twisted.norm(v) == 0
    q = quotient_by_isotropic(twisted, v)
    assert q.rank == 1
    assert q.disc_abs == 50

    # Second, independently chosen basis: permute the ambient basis first.
    perm = IntegralLattice(((2, 0, 0), (0, -2, -5), (0, -5, 0)))
    q2 = quotient_by_isotropic(perm, (1, 1, 0))
    assert q2.disc_abs == 50


def test_enumerate_vectors_examples():
    l2 = rank_one(2)
    assert enumerate_vectors(l2, 2, 1) == [(-1,), (1,)]

    u = hyperbolic_plane()
    zeros = enumerate_vectors(u, 0, 1)
    assert len(zeros) == 5
    assert (0, 0) in zeros

    lam10 = polarization_lattice(5)
    found = enumerate_vectors(lam10, 2, 2)
    assert (0, 1, 1) in found
    assert (1, 2, -2) in found


def test_enumerate_vectors_closed_under_negation():
    rng = random.Random(7)
    for _ in range(10):
        n = rng.randint(1, 3)
        gram = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                val = rng.randint(-3, 3)
                if i == j:
                    val = 2 * rng.randint(-2, 2)
                gram[i][j] = gram[j][i] = val
        lattice = IntegralLattice(mx.freeze(gram))
        vecs = enumerate_vectors(lattice, 2 * rng.randint(0, 3), 2)
        s = set(vecs)
        assert all(tuple(-c for c in v) in s for v in vecs)
        assert vecs == sorted(vecs)


def test_embedding_invariants_random():
    rng = random.Random(8)
    lam6 = polarization_lattice(3)
    for _ in range(40):
        cols = []
        for _ in range(2):
            cols.append(tuple(rng.randint(-3, 3) for _ in range(3)))
        m = mx.transpose(mx.freeze(cols))
        if len(mx.smith_invariants(m)) < 2:
            continue
        e = sublattice(lam6, cols)
        lhs = mx.mat_mul(mx.mat_mul(mx.transpose(e.matrix), lam6.gram), e.matrix)
        assert lhs == e.source.gram
        s = saturation(e)
        assert is_primitive_sublattice(s)
        assert saturation(s) is s


def test_index_disc_identity():
    # index^2 * |det L| = |det induced| for random full-rank sublattices.
    rng = random.Random(9)
    lam4 = polarization_lattice(2)
    for _ in range(30):
        cols = [tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(3)]
        m = mx.transpose(mx.freeze(cols))
        if mx.det(m) == 0:
            continue
        e = sublattice(lam4, cols)
        idx = index_of_sublattice(lam4, e)
        assert idx * idx * lam4.disc_abs == abs(e.source.det)
