import json

import pytest

from dgtwist.exactlinalg import GF, QQ, cohomology_dims
from dgtwist.operad import (BasisGuardExceeded, OperadError, Ordinal2, augmentation, augmentation_is_chain_map,
                            check_contractible, flat_object, nesting_check, operad_complex, ordinals, sweep,
                            sweep_summary)


def test_golden_smallest_component():
    oc = operad_complex(Ordinal2((1, 1)))
    assert oc.dims() == {-1: 1, 0: 2}
    d = oc.complex.differential(-1).to_dense()
    assert sorted(row[0] for row in d) == [-1, 1]
    assert cohomology_dims(oc.complex) == {-1: 0, 0: 1}
    assert set(augmentation(oc).values()) == {1}
    assert augmentation_is_chain_map(oc)


def test_golden_labels():
    oc = operad_complex(Ordinal2((1, 1)))
    assert oc.labels()[-1] == ["id_0 | eps(f1; 0->1) | id_1"]
    assert flat_object(oc.target) == (1, 1)


def test_single_level_is_an_interval_hom():
    for n in range(4):
        cert = check_contractible(Ordinal2((n,)))
        assert cert.dims == {0: 1} and cert.verdict


def test_augmentation_kills_epsilon_words():
    oc = operad_complex(Ordinal2((2, 1)))
    aug = augmentation(oc)
    assert all(v == 0 for w, v in aug.items() if w.has_epsilon())
    assert any(v for v in aug.values())
    assert augmentation_is_chain_map(oc)


def test_three_levels():
    cert = check_contractible(Ordinal2((1, 2)))
    assert cert.euler_characteristic == 1
    assert cert.H == {0: 1}
    cert = check_contractible(Ordinal2((1, 1, 1)))
    assert cert.verdict and cert.augmentation != 0


@pytest.mark.parametrize("o", ["1", "1,1", "2,0", "1,2", "0,1,1"])
def test_appending_a_zero_level_changes_nothing(o):
    assert nesting_check(Ordinal2.parse(o))


def test_guard_aborts():
    with pytest.raises(BasisGuardExceeded) as e:
        check_contractible(Ordinal2((2, 2)), guard=3)
    assert e.value.guard == 3


def test_certificate_is_deterministic_and_self_describing():
    a = json.dumps(check_contractible(Ordinal2((1, 1))).to_json())
    b = json.dumps(check_contractible(Ordinal2((1, 1))).to_json())
    assert a == b
    doc = json.loads(a)
    assert doc["ordinal"] == [1, 1] and doc["field"] == QQ.name
    assert doc["dims"] == {"-1": 1, "0": 2} and doc["ranks"] == {"-1": 1}
    assert doc["augmentation"] == {"value_on_H0_representative": "1", "chain_map": True}
    assert "timings" not in doc
    assert "timings" in check_contractible(Ordinal2((1, 1)), timings=True).to_json()


@pytest.mark.parametrize("text", ["", "a,b", "1,-1", ",,"])
def test_bad_ordinals(text):
    with pytest.raises(OperadError):
        Ordinal2.parse(text)


def test_ordinal_enumeration():
    os_ = ordinals(3, 5)
    assert len(os_) == len(set(os_)) == 6 + 21 + 56
    assert str(Ordinal2.parse(" 1, 2 ")) == "1,2"


def test_small_sweep_agrees_over_a_prime():
    q = sweep(2, 3)
    p = sweep(2, 3, field=GF(32003))
    assert sweep_summary(q)["passed"] == len(q)
    assert [e.certificate.H for e in q] == [e.certificate.H for e in p]


def test_sweep_reports_aborted_ordinals():
    s = sweep_summary(sweep(2, 3, guard=4))
    assert s["aborted"] > 0
    assert s["passed"] + s["aborted"] == s["ordinals"]
    assert all(r["aborted"] for r in s["rows"] if r["verdict"] is None)
