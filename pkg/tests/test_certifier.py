import random

import pytest

from mipoly.certifier import (
    Failure,
    FailureKind,
    IntersectivityCertificate,
    Verdict,
    certify_intersective,
    check_condition_1a,
    check_condition_1b,
    check_condition_2,
    decide_by_local_solvability,
    find_witness_modulus,
)
from mipoly.errors import FamilyError, SearchExhausted
from mipoly.family import validate_family
from mipoly.gf2kernel import SubsetWitness
from mipoly.ntheory import is_prime, legendre, next_prime
from mipoly.oracle import sweep, verify_certificate

from conftest import F4, F5, brute_roots, corpus


@pytest.mark.parametrize(
    "raw,code",
    [
        ((15, 17, 17), "DUPLICATE"),
        ((12, 17, 255), "NOT_SQUAREFREE"),
        ((15, 17), "TOO_SHORT"),
        ((0, 17, 255), "ZERO_OR_ONE"),
        ((1, 17, 255), "ZERO_OR_ONE"),
    ],
)
def test_validate_family_errors(raw, code):
    with pytest.raises(FamilyError) as exc:
        validate_family(raw)
    assert exc.value.code == code


def test_validate_family_ok():
    fam = validate_family(F4)
    assert fam.values == F4
    assert fam[4].value == 2161
    assert fam.odd_primes() == [3, 5, 17, 2161]


def test_condition_1a():
    assert check_condition_1a(F4) == SubsetWitness((1, 2, 3))
    assert check_condition_1a(F5) == SubsetWitness((1, 2, 4))
    assert check_condition_1a((17, 255, 2161)) is None


def test_condition_1b_f4():
    ws = check_condition_1b(F4, SubsetWitness((1, 2, 3)))
    pairs = {(w.j, w.p) for w in ws}
    assert pairs == {(1, 3), (1, 5), (2, 17), (3, 3), (3, 5), (3, 17)}
    for w in ws:
        assert w.i != w.j and legendre(F4[w.i - 1], w.p) == 1
        # smallest qualifying index
        assert all(legendre(F4[i - 1], w.p) != 1 for i in range(1, w.i) if i != w.j)
    # 2161 witnesses both seed primes; at 17, 15 = 7^2 mod 17 comes first
    assert {(w.j, w.p): w.i for w in ws}[(1, 3)] == 4
    assert {(w.j, w.p): w.i for w in ws}[(2, 17)] == 1


def test_condition_1b_gap():
    assert check_condition_1b((15, 17, 255), SubsetWitness((1, 2, 3))) == Failure(FailureKind.LEGENDRE_GAP, 1, 3)
    assert legendre(17, 3) == -1 and legendre(255, 3) == 0


def test_condition_2():
    assert check_condition_2(F4) == 2
    assert check_condition_2(F5) == 2
    assert check_condition_2((15, 255, 557)) is None
    assert check_condition_2((15, 255, -7)) == 3  # -7 = 8*(-1) + 1


def test_certify_f4():
    cert = certify_intersective(F4)
    assert cert.verdict is Verdict.INTERSECTIVE
    assert cert.subset_T.indices == (1, 2, 3)
    assert cert.mod8_witness == 2
    assert cert.failure is None and cert.witness_modulus is None
    assert verify_certificate(cert)


def test_certify_f5():
    cert = certify_intersective(F5)
    assert cert.verdict is Verdict.INTERSECTIVE
    assert cert.subset_T.indices == (1, 2, 4)
    assert cert.mod8_witness == 2


def test_certify_negative_example():
    cert = certify_intersective((15, 17, 255))
    assert cert.verdict is Verdict.NOT_INTERSECTIVE
    assert cert.failure == Failure(FailureKind.LEGENDRE_GAP, 1, 3)
    wm = cert.witness_modulus
    assert (wm.prime, wm.exponent, wm.modulus, wm.verified_by_scan) == (3, 3, 27, True)
    assert brute_roots((15, 17, 255), 27) == []
    assert not cert.prop1_only


def test_witness_moduli():
    wm = find_witness_modulus((15, 17, 557, 255))
    # primes are tried in ascending order; 3 already works (profiles 1, 0, 0, 1)
    assert (wm.prime, wm.exponent, wm.modulus) == (3, 3, 27)
    assert brute_roots((15, 17, 557, 255), 27) == []
    assert brute_roots((15, 17, 557, 255), 125) == []  # the p = 5 witness is valid too
    wm = find_witness_modulus((17, 255, 2161))
    assert (wm.prime, wm.exponent, wm.modulus) == (7, 1, 7)
    assert all(legendre(a, 7) == -1 for a in (17, 255, 2161))
    assert brute_roots((17, 255, 2161), 7) == []
    # no smaller prime outside 2*3*5*17*2161 works
    assert all(any(legendre(a, p) != -1 for a in (17, 255, 2161)) for p in range(7) if is_prime(p) and p > 5)


def test_witness_search_exhausted():
    with pytest.raises(SearchExhausted):
        find_witness_modulus((17, 255, 2161), scan_bound=5)
    cert = certify_intersective((17, 255, 2161), scan_bound=5)
    assert cert.prop1_only and cert.witness_modulus is None
    assert cert.failure.kind is FailureKind.NO_ODD_SQUARE_SUBSET
    assert verify_certificate(cert)


def test_local_solvability_examples():
    assert decide_by_local_solvability(F4) is Verdict.INTERSECTIVE
    assert decide_by_local_solvability((15, 17, 255)) is Verdict.NOT_INTERSECTIVE
    assert decide_by_local_solvability((15, 17, 2161)) is Verdict.NOT_INTERSECTIVE


def test_both_decisions_agree_on_corpus():
    for fam in corpus(101, 300, negative=True):
        cert = certify_intersective(fam)
        assert cert.verdict is decide_by_local_solvability(fam), fam
        assert verify_certificate(cert), fam


def test_soundness_against_brute_force():
    fams = corpus(55, 60)
    positives = [f for f in fams if certify_intersective(f).intersective]
    assert positives
    for fam in positives[:15]:
        assert sweep(fam, 5000).first_failure is None, fam
    for fam in fams:
        cert = certify_intersective(fam)
        wm = cert.witness_modulus
        if wm is not None and wm.verified_by_scan and wm.modulus <= 3000:
            assert brute_roots(fam, wm.modulus) == []


def test_generic_primes_have_a_residue():
    rng = random.Random(9)
    fams = [f for f in corpus(77, 80) if certify_intersective(f).intersective]
    assert fams
    for fam in fams[:10]:
        prod = 2
        for a in fam:
            prod *= abs(a)
        count = 0
        while count < 100:
            p = next_prime(rng.randint(10, 10**7))
            if prod % p == 0:
                continue
            count += 1
            assert any(legendre(a, p) == 1 for a in fam), (fam, p)


def test_certificate_dict_round_trip():
    for fam in (F4, F5, (15, 17, 255), (17, 255, 2161)):
        cert = certify_intersective(fam)
        assert IntersectivityCertificate.from_dict(cert.to_dict()) == cert
