import random

import pytest

from k3lat.errors import LatticeError, NotIsotropicError, NotPrimeError
from k3lat.matrices import freeze
from k3lat.mukai import NeronSeveriData
from k3lat.twisted import (
    TranscendentalModel,
    divisibility_nv,
    partner_disc,
    twisted_disc_identity,
    twisted_lattice,
    witness_sequence,
)

NS2 = NeronSeveriData(((2,),))
T2 = TranscendentalModel(((-2,),))


def test_twisted_lattice_gram():
    twist = twisted_lattice(NS2, T2, 5)
    assert twist.lattice.gram == ((-2, -5, 0), (-5, 0, 0), (0, 0, 2))
    assert twist.lattice.disc_abs == 50

    untwisted = twisted_lattice(NS2, T2, 1)
    assert untwisted.lattice.disc_abs == 2

    assert twisted_lattice(NS2, T2, 3).lattice.det == -9 * 2


def test_twisted_disc_identity_examples():
    lhs, rhs, equal = twisted_disc_identity(NS2, T2, 5)
    assert (lhs, rhs, equal) == (50, 50, True)
    assert twisted_disc_identity(NS2, T2, 1)[2]
    ns = NeronSeveriData(((2, 1), (1, 2)))
    for r in (1, 5, 7, 25):
        assert twisted_disc_identity(ns, T2, r)[2]


def test_twisted_disc_identity_fuzz():
    rng = random.Random(31)
    checked = 0
    while checked < 40:
        rank = rng.randint(1, 4)
        gram = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i + 1):
                val = rng.randint(-10, 10)
                if i == j:
                    val = 2 * rng.randint(-10, 10)
                gram[i][j] = gram[j][i] = val
        gram[0][0] = 2 * rng.randint(1, 10)
        from k3lat.matrices import det

        if det(freeze(gram)) == 0:
            continue
        ns = NeronSeveriData(freeze(gram))
        ell = rng.choice([5, 7])
        n = rng.randint(1, 3)
        trans = TranscendentalModel(((-gram[0][0],),))
        assert twisted_disc_identity(ns, trans, ell**n)[2]
        checked += 1


def test_divisibility_nv():
    twist = twisted_lattice(NS2, T2, 5)
    v1 = twist.vector(1, 0, (1,))
    assert divisibility_nv(twist, v1) == 1

    omega = twist.vector(0, 1)
    assert divisibility_nv(twist, omega) == 5

    with pytest.raises(LatticeError):
        divisibility_nv(twist, (0, 0, 0))


def test_partner_disc_examples():
    twist = twisted_lattice(NS2, T2, 5)
    v1 = twist.vector(1, 0, (1,))
    report = partner_disc(twist, v1, ell=5)
    assert report.disc_quotient_abs == 50
    assert report.ell_valuation == 2
    assert report.identity_holds
    assert report.p_t_exponent == 0

    twist2 = twisted_lattice(NS2, T2, 25)
    v2 = twist2.vector(1, 0, (1,))
    report2 = partner_disc(twist2, v2, ell=5)
    assert report2.ell_valuation == 4
    assert report2.identity_holds

    # r = 1, v = omega: the quotient is NS itself.
    untwisted = twisted_lattice(NS2, T2, 1)
    omega = untwisted.vector(0, 1)
    report3 = partner_disc(untwisted, omega)
    assert report3.n_v == 1
    assert report3.disc_quotient_abs == NS2.lattice().disc_abs
    assert report3.identity_holds

    with pytest.raises(NotIsotropicError):
        partner_disc(twist, twist.vector(1, 1, (1,)))


def test_witness_sequence_d1_ell5():
    records = witness_sequence(1, 5, 3)
    assert [r.identities["h_sq"] for r in records] == [50, 1250, 31250]
    assert [r.ell_valuation for r in records] == [2, 4, 6]
    for rec in records:
        assert rec.identities["v_sq_zero"]
        assert rec.identities["h_dot_v_zero"]
        assert rec.identities["h_sq_expected"]
        assert rec.identities["partner_identity"]
        assert rec.n_v**2 <= 4
        assert rec.p_t_exponent == 0


def test_witness_sequence_with_b():
    records = witness_sequence(1, 5, 2, e=3)
    for rec in records:
        assert rec.b_n is not None
        assert rec.identities["b_dot_v_zero"]
        assert rec.identities["b_sq_expected"]


def test_witness_sequence_valuation_growth():
    for ell in (5, 17):
        records = witness_sequence(1, ell, 5)
        vals = [r.ell_valuation for r in records]
        assert vals == [2 * n for n in range(1, 6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_witness_sequence_errors():
    with pytest.raises(NotPrimeError):
        witness_sequence(1, 4, 2)
    with pytest.raises(LatticeError):
        witness_sequence(
            2,
            5,
            2,
            ns=NS2,
            trans=T2,
            d_coeffs=(1,),
        )  # gamma^2 = -2 but the sequence needs -4


def test_witness_sequence_custom_model():
    # Rank-2 NS with an off-diagonal entry; D = first basis vector.
    ns = NeronSeveriData(((4, 1), (1, 6)))
    trans = TranscendentalModel(((-4, 0), (0, -2)), gamma_index=0)
    records = witness_sequence(2, 7, 3, ns=ns, trans=trans, d_coeffs=(1, 0))
    assert [r.ell_valuation for r in records] == [2, 4, 6]
    for rec in records:
        assert rec.identities["partner_identity"]
