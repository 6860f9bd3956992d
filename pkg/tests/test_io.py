import json

import pytest

from dgtwist.dgcat import collapse_fixture, interval, random_directed_category, validate
from dgtwist.exactlinalg import Matrix
from dgtwist.io import (CategoryFormatError, dump_category, dumps, load_category, matrix_triplets,
                        save_category)
from dgtwist.twist import TwistedTensor


def same_structure(A, B):
    la = sorted(A.label(k) for k in A.basis_keys())
    lb = sorted(B.label(k) for k in B.basis_keys())
    # loaded copies list each hom basis by label, so compare entries as sets
    da = sorted(map(repr, dump_category(A)["differential"]))
    db = sorted(map(repr, dump_category(B)["differential"]))
    return la == lb and da == db


@pytest.mark.parametrize("C", [interval(2), collapse_fixture()[0], random_directed_category(3)])
def test_round_trip(C, tmp_path):
    path = tmp_path / "c.json"
    save_category(C, path)
    D = load_category(path)
    assert validate(D).ok
    assert dumps(dump_category(D)) == path.read_text()


def test_round_trip_of_a_twisted_product():
    W = TwistedTensor(1, collapse_fixture()[0])
    D = load_category(dumps(dump_category(W)))
    assert same_structure(W, D)
    assert validate(D).ok


def test_omitted_composition_is_rebuilt():
    W = TwistedTensor(1, TwistedTensor(1, interval(1)))
    doc = dump_category(W, omit_composition=True)
    assert "composition" not in doc
    D = load_category(doc)
    assert same_structure(W, D)
    assert dump_category(D)["composition"] and validate(D).ok


def test_omitting_needs_a_construction():
    with pytest.raises(CategoryFormatError):
        dump_category(interval(1), omit_composition=True)


def doc_of(C):
    return json.loads(dumps(dump_category(C)))


def test_missing_identity_names_the_field():
    doc = doc_of(interval(1))
    del doc["identities"]["0"]
    with pytest.raises(CategoryFormatError, match=r"identities.*'0'"):
        load_category(doc)


def test_unknown_field_rejected():
    doc = doc_of(interval(1))
    doc["foo"] = 1
    with pytest.raises(CategoryFormatError, match="foo"):
        load_category(doc)


def test_bad_coefficient():
    doc = doc_of(collapse_fixture()[0])
    doc["differential"][0]["coeff"] = 1.5
    with pytest.raises(CategoryFormatError, match="coeff"):
        load_category(doc)


def test_rational_coefficients_survive():
    doc = doc_of(collapse_fixture()[0])
    doc["differential"][0]["coeff"] = "2/4"
    C = load_category(doc)
    assert dump_category(C)["differential"][0]["coeff"] == "1/2"


def test_construction_mismatch_detected():
    doc = dump_category(TwistedTensor(1, interval(1)), omit_composition=False)
    doc = json.loads(dumps(doc))
    del doc["composition"]
    doc["homs"][0]["basis"][0]["degree"] = 5
    with pytest.raises(CategoryFormatError):
        load_category(doc)


def test_not_json():
    with pytest.raises(CategoryFormatError):
        load_category("{not json")


def test_triplets():
    assert matrix_triplets(Matrix.from_dense([[0, 2], [-1, 0]])) == [[0, 1, 2, 1], [1, 0, -1, 1]]
