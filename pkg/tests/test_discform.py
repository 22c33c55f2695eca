import itertools
from fractions import Fraction

import pytest

from k3lat.discform import (
    FiniteSubgroup,
    SubgroupMap,
    all_subgroups,
    discriminant_data,
    discriminant_form,
    glue_perp_quotient,
    q_value,
    subgroup_isometries,
)
from k3lat.errors import LatticeError, OddLatticeError
from k3lat.intlat import IntegralLattice, hyperbolic_plane, polarization_lattice, rank_one


def test_discriminant_form_rank_one():
    for n in (1, 2, 3, 5):
        a = discriminant_form(rank_one(2 * n))
        assert a.orders == (2 * n,)
        assert a.q == (Fraction(1, 2 * n),)


def test_discriminant_form_hyperbolic_and_diag22():
    assert discriminant_form(hyperbolic_plane()).orders == ()

    a = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    assert a.orders == (2, 2)
    assert set(a.q) == {Fraction(1, 2)}
    assert a.b[0][1] == 0


def test_discriminant_form_errors():
    with pytest.raises(OddLatticeError):
        discriminant_form(IntegralLattice(((1,),)))
    with pytest.raises(LatticeError):
        discriminant_form(IntegralLattice(((2, 0), (0, 0))))


def test_q_value_examples():
    a = discriminant_form(rank_one(10))
    assert q_value(a, (1,)) == Fraction(1, 10)
    assert q_value(a, (0,)) == 0
    assert q_value(a, (3,)) == Fraction(9, 10)


def test_group_order_matches_det():
    for lattice in (
        rank_one(4),
        rank_one(12),
        IntegralLattice(((2, 1), (1, 2))),
        IntegralLattice(((4, 1), (1, 4))),
        polarization_lattice(3),
    ):
        a = discriminant_form(lattice)
        assert a.order == lattice.disc_abs


def test_polarization_identity_exhaustive():
    # q(x + y) - q(x) - q(y) = 2 b(x, y) mod 2 on groups of order <= 200.
    lattices = [
        rank_one(2),
        rank_one(10),
        rank_one(14),
        IntegralLattice(((2, 0), (0, 8))),
        IntegralLattice(((4, 1), (1, 4))),
        IntegralLattice(((6, 2), (2, 6))),
        IntegralLattice(((2, 1, 0), (1, 2, 1), (0, 1, 4))),
    ]
    for lattice in lattices:
        a = discriminant_form(lattice)
        assert a.order <= 200
        elems = a.elements()
        for x, y in itertools.product(elems, repeat=2):
            lhs = (a.q_of(a.add(x, y)) - a.q_of(x) - a.q_of(y)) % 2
            assert lhs == (2 * a.b_of(x, y)) % 2


def test_class_of_and_dual_representative_roundtrip():
    data = discriminant_data(IntegralLattice(((2, 0), (0, 8))))
    for x in data.form.elements():
        rep = data.dual_representative(x)
        assert data.class_of(rep) == x


def test_subgroup_structure():
    a = discriminant_form(IntegralLattice(((2, 0), (0, 8))))
    full = FiniteSubgroup.full(a)
    assert full.order == 16
    assert full.invariant_factors == (2, 8)
    sub = FiniteSubgroup.generated_by(a, [(1, 4)])
    assert sub.order == 2
    assert (1, 4) in sub
    assert (0, 4) not in sub


def test_subgroup_isometries_examples():
    trivial_l = discriminant_form(hyperbolic_plane())
    t = FiniteSubgroup.trivial(trivial_l)
    maps = subgroup_isometries(t, t)
    assert len(maps) == 1

    a2 = discriminant_form(rank_one(2))     # Z/2 with q(1) = 1/2
    am2 = discriminant_form(rank_one(-2))   # Z/2 with q(1) = 3/2
    v = FiniteSubgroup.full(a2)
    assert len(subgroup_isometries(v, v)) == 1
    assert subgroup_isometries(v, FiniteSubgroup.full(am2)) == []


def test_subgroup_isometries_closed_under_automorphisms():
    a = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    v = FiniteSubgroup.full(a)
    isos = subgroup_isometries(v, v)
    keyed = {g.images for g in isos}
    for g in isos:
        for h in isos:
            comp = SubgroupMap(v, v, tuple(h(g(x)) for x in v.structure_gens))
            assert comp.images in keyed


def test_glue_trivial():
    a = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    b = discriminant_form(rank_one(2))
    gamma = subgroup_isometries(FiniteSubgroup.trivial(a), FiniteSubgroup.trivial(b))[0]
    res = glue_perp_quotient(a, b, gamma)
    assert res.gamma.order == 1
    assert res.gamma_perp.order == a.order * b.order
    assert res.quotient.order == a.order * b.order
    # q_src + (-q_amb) on the generators of the full product.
    assert res.product.q == (Fraction(1, 2), Fraction(1, 2), Fraction(3, 2))


def test_glue_diag22_into_degree2():
    # The primitive embedding of diag(2,2) into <2> + U glues to Z/2 with q = 1/2.
    a_src = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    a_amb = discriminant_form(rank_one(2))
    v = FiniteSubgroup.generated_by(a_src, [(0, 1)])
    w = FiniteSubgroup.full(a_amb)
    isos = subgroup_isometries(v, w)
    assert len(isos) == 1
    res = glue_perp_quotient(a_src, a_amb, isos[0])
    assert res.quotient.orders == (2,)
    assert res.quotient.q == (Fraction(1, 2),)


def test_glue_counting_identity():
    # |quotient| * |graph|^2 = |A_src| * |A_amb| for nondegenerate ambient pairing.
    cases = []
    a_src = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    a_amb = discriminant_form(rank_one(2))
    v = FiniteSubgroup.generated_by(a_src, [(1, 0)])
    cases.append((a_src, a_amb, subgroup_isometries(v, FiniteSubgroup.full(a_amb))[0]))
    t = FiniteSubgroup.trivial(a_src)
    cases.append((a_src, a_amb, subgroup_isometries(t, FiniteSubgroup.trivial(a_amb))[0]))
    for src, amb, gamma in cases:
        res = glue_perp_quotient(src, amb, gamma)
        assert res.quotient.order * res.gamma.order**2 == src.order * amb.order


def test_glue_project():
    a_src = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    a_amb = discriminant_form(rank_one(2))
    v = FiniteSubgroup.generated_by(a_src, [(0, 1)])
    gamma = subgroup_isometries(v, FiniteSubgroup.full(a_amb))[0]
    res = glue_perp_quotient(a_src, a_amb, gamma)
    # Graph elements project to zero; a generator rep projects to a generator.
    for x in res.gamma.elements:
        assert res.project(x) == (0,)
    rep = res.reps[0]
    assert res.project(rep) == (1,)
    assert res.quotient.q_of(res.project(rep)) == res.product.q_of(rep)


def test_size_limit():
    from k3lat.errors import SizeLimitError
    from k3lat.intlat import rank_one

    big = discriminant_form(rank_one(2 * 10_007))
    with pytest.raises(SizeLimitError):
        big.elements()


def test_all_subgroups():
    a = discriminant_form(IntegralLattice(((2, 0), (0, 2))))
    subs = all_subgroups(a)
    # (Z/2)^2 has 5 subgroups: 1, three Z/2, full.
    assert len(subs) == 5
    orders = sorted(s.order for s in subs)
    assert orders == [1, 2, 2, 2, 4]

    c6 = discriminant_form(rank_one(6))
    assert sorted(s.order for s in all_subgroups(c6)) == [1, 2, 3, 6]
