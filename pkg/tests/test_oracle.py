import copy
import math
import random

import pytest

from mipoly.certifier import certify_intersective
from mipoly.errors import DomainError, SchemaError
from mipoly.minimality import certify_minimal
from mipoly.ntheory import INFINITE, ResidueClass, primes_up_to, solvability_profile, witness_exponent
from mipoly.oracle import (
    density_formula,
    density_scan,
    first_root,
    rejection_reason,
    roots_mod,
    squarefree_sieve,
    sweep,
    verify_certificate,
)

from conftest import F4, F5, brute_roots, random_family


def test_roots_mod_examples():
    assert roots_mod((15, 17, 255), 9) == [0, 3, 6]
    assert roots_mod((15, 17, 255), 27) == []
    assert roots_mod((2,), 7) == [3, 4]
    assert first_root((15, 17, 255), 27) is None
    assert first_root(F4, 2040) == brute_roots(F4, 2040)[0]


def test_roots_mod_matches_brute_force():
    rng = random.Random(8)
    for _ in range(40):
        fam = random_family(rng, rng.randint(1, 4), bound=200, negative=True)
        m = rng.randint(2, 600)
        assert roots_mod(fam, m) == brute_roots(fam, m)
        assert first_root(fam, m) == (brute_roots(fam, m) or [None])[0]


def test_sweep_examples():
    res = sweep((15, 17, 255), 30)
    assert res.first_failure == 27
    assert sweep((15, 17, 255), 26).first_failure is None
    assert sweep(drop_557 := (15, 17, 255, 871711), 10_000).first_failure is None
    assert all(math.prod(r * r - a for a in drop_557) % m == 0 for m, r in sweep(drop_557, 500).roots_sample.items())


def test_sweep_methods_agree():
    rng = random.Random(12)
    for k in range(20):
        fam = random_family(rng, rng.randint(3, 5), bound=300, structured=k % 2 == 0)
        a, b = sweep(fam, 1000, "naive"), sweep(fam, 1000, "crt")
        assert a.first_failure == b.first_failure, fam
        for m, r in b.roots_sample.items():
            assert math.prod(r * r - v for v in fam) % m == 0


def test_sweep_rejects_bad_args():
    with pytest.raises(DomainError):
        sweep(F4, 1)
    with pytest.raises(DomainError):
        sweep(F4, 10, "fast")


def test_roots_consistent_with_profiles():
    rng = random.Random(21)
    for _ in range(40):
        fam = random_family(rng, 3, bound=400)
        for p in (2, 3, 5, 7):
            e = witness_exponent(fam, p)
            if e != INFINITE and p**e <= 20_000:
                assert first_root(fam, p**e) is None
                # E is an upper bound; the true first failure lies above every single-factor profile
                k = next(k for k in range(1, e + 1) if first_root(fam, p**k) is None)
                assert k > max(solvability_profile(a, p).max_exponent for a in fam)


def test_squarefree_sieve():
    sf = squarefree_sieve(1000)
    assert [k for k in range(1, 30) if sf[k]] == [1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29]
    assert sf.sum() == sum(1 for k in range(1, 1001) if all(k % (p * p) for p in primes_up_to(31)))


def test_density_main_class():
    est = density_scan(ResidueClass(121, 2040), 255, 10**6)
    assert est.formula_applicable
    assert est.formula_value == pytest.approx(4.672e-4, rel=1e-3)
    assert est.relative_gap < 0.1
    small = density_scan(ResidueClass(121, 2040), 255, 10**5)
    assert abs(float(small.empirical) - float(est.empirical)) / float(est.empirical) < 0.1


def test_density_control_odd_squarefree():
    est = density_scan(ResidueClass(1, 2), 0, 10**6)
    assert density_formula(2) == pytest.approx(6 / math.pi**2 * 0.5 * 4 / 3)
    assert est.relative_gap < 0.01


def test_density_inapplicable_class():
    est = density_scan(ResidueClass(4, 8), 0, 10_000)
    assert not est.formula_applicable and est.qualifying_count == 0 and est.relative_gap is None


# ---------------------------------------------------------------------------
# tampered certificates


def _f4():
    return certify_intersective(F4).to_dict()


def _neg():
    return certify_intersective((15, 17, 255)).to_dict()


def _mut_parity(d):
    d["subset_T"] = ["1", "2"]


def _mut_non_square(d):
    d["subset_T"] = ["1", "2", "4"]


def _mut_legendre_i(d):
    d["legendre_witnesses"][0]["i"] = "2"  # (17/3) = -1


def _mut_legendre_missing(d):
    d["legendre_witnesses"].pop()


def _mut_legendre_self(d):
    d["legendre_witnesses"][0]["i"] = d["legendre_witnesses"][0]["j"]


def _mut_mod8(d):
    d["mod8_witness"] = "1"


def _mut_verdict(d):
    d["verdict"] = "NOT_INTERSECTIVE"


def _mut_family(d):
    d["family"][3] = "2163"


def _mut_undersized_modulus(d):
    d["witness_modulus"].update(exponent="2", modulus="9")


def _mut_modulus_mismatch(d):
    d["witness_modulus"]["modulus"] = "81"


def _mut_failure_claim(d):
    d["failure"] = {"kind": "NO_ODD_SQUARE_SUBSET", "j": None, "p": None}


def _mut_prop1_flag(d):
    d["prop1_only"] = True


MUTANTS = [
    (_f4, _mut_parity),
    (_f4, _mut_non_square),
    (_f4, _mut_legendre_i),
    (_f4, _mut_legendre_missing),
    (_f4, _mut_legendre_self),
    (_f4, _mut_mod8),
    (_f4, _mut_verdict),
    (_f4, _mut_family),
    (_neg, _mut_undersized_modulus),
    (_neg, _mut_modulus_mismatch),
    (_neg, _mut_failure_claim),
    (_neg, _mut_prop1_flag),
]


@pytest.mark.parametrize("base,mutate", MUTANTS, ids=[m.__name__[5:] for _, m in MUTANTS])
def test_tampered_certificate_rejected(base, mutate):
    d = base()
    assert verify_certificate(d)
    mutate(d)
    assert not verify_certificate(d)
    assert rejection_reason(d)


def test_tampered_minimality_reports():
    good = certify_minimal(F5).to_dict()
    assert verify_certificate(good)
    bad = copy.deepcopy(good)
    bad["verdict"] = "MINIMAL"
    assert not verify_certificate(bad)
    bad = copy.deepcopy(good)
    bad["offending_indices"] = []
    assert not verify_certificate(bad)
    bad = copy.deepcopy(good)
    bad["divisor_reports"][0], bad["divisor_reports"][1] = bad["divisor_reports"][1], bad["divisor_reports"][0]
    assert not verify_certificate(bad)


def test_missing_field_is_schema_error():
    d = _f4()
    del d["verdict"]
    with pytest.raises(SchemaError):
        verify_certificate(d)


def test_all_emitted_documents_verify():
    for fam in (F4, F5, (15, 17, 255), (17, 255, 2161), (15, 17, 557, 255)):
        assert verify_certificate(certify_intersective(fam))
    for fam in (F4, F5):
        assert verify_certificate(certify_minimal(fam))
