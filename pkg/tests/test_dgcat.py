import copy

import pytest

from dgtwist.dgcat import (DgCategoryError, DgFunctor, FiniteDgCategory, FunctorError, MalformedCategoryError,
                           Morphism, NotDirectedError, apply_functor, check_witness, collapse_fixture,
                           directedness_witness, ensure_directed, identity_functor, interval,
                           is_quasi_equivalence_on_homs, path_category, random_directed_category,
                           relabel_check, tensor, validate)
from dgtwist.exactlinalg import cohomology_dims


def total_euler(C):
    return sum(C.hom_complex(x, y).euler_characteristic() for x in C.objects for y in C.objects)


def _mutate(C, table, key, new):
    """A copy of C with one structure constant replaced (no validation on build)."""
    D = copy.copy(C)
    D._diff = copy.deepcopy(C._diff)
    D._comp = copy.deepcopy(C._comp)
    D._homs = None
    getattr(D, table)[key] = new
    return D


def test_interval_shape():
    I3 = interval(3)
    assert len(I3.objects) == 4
    assert len(I3.basis_keys()) == 10
    assert I3.compose("1->2", "0->1") == {"0->2": 1}
    assert I3.hom("2", "1") == ()
    assert validate(I3).ok
    assert ensure_directed(I3) == ["0", "1", "2", "3"]


def test_interval_rejects_negative():
    with pytest.raises(ValueError):
        interval(-1)


def test_collapse_fixture_homs():
    C, F = collapse_fixture()
    assert validate(C).ok
    assert {C.label(k): C.degree(k) for k in C.hom("0", "1")} == {"v": -1, "u": 0, "w": 0}
    assert cohomology_dims(C.hom_complex("0", "1")) == {-1: 0, 0: 1}
    assert F.check() is None


def test_collapse_functor_is_quasi_equivalence():
    C, F = collapse_fixture()
    cert = is_quasi_equivalence_on_homs(F)
    assert cert.ok
    assert cert.pairs[("0", "1")]["source_H"] == {0: 1}


def test_functor_must_be_bijective_on_objects():
    C, F = collapse_fixture()
    G = DgFunctor(C, interval(0), {"0": "0", "1": "0"}, {"id_0": {"id_0": 1}, "id_1": {"id_0": 1}})
    with pytest.raises(FunctorError):
        is_quasi_equivalence_on_homs(G)


def test_functor_check_catches_broken_differential():
    C, F = collapse_fixture()
    # sending v to the generator breaks degree and d-compatibility
    G = DgFunctor(C, F.target, F.object_map, dict(F.images, v={"0->1": 1}))
    assert G.check() is not None


def test_identity_functor_and_apply():
    C = random_directed_category(1)
    Id = identity_functor(C)
    assert Id.check() is None
    k = next(k for k in C.basis_keys() if not C.is_identity(k))
    assert apply_functor(Id, {k: 3}) == {k: 3}


def test_tensor_euler_characteristic_multiplies():
    C, _ = collapse_fixture()
    D = random_directed_category(2)
    T = tensor(C, D)
    assert total_euler(T) == total_euler(C) * total_euler(D)


def test_tensor_is_associative_up_to_relabeling():
    A, B, C = interval(1), collapse_fixture()[0], random_directed_category(4)
    L, R = tensor(tensor(A, B), C), tensor(A, tensor(B, C))
    objects = {((x, y), z): (x, (y, z)) for x in A.objects for y in B.objects for z in C.objects}
    basis = {((f, g), h): (f, (g, h)) for (f, g), h in L.basis_keys()}
    assert relabel_check(L, R, objects, basis) is None


def test_tensor_koszul_sign():
    C, _ = collapse_fixture()
    T = tensor(C, C)
    # (f⊗g)∘(f'⊗g') = (-1)^{|g||f'|} ff'⊗gg'
    assert T.compose(("id_1", "v"), ("v", "id_0")) == {("v", "v"): -1}
    assert T.compose(("v", "id_1"), ("id_0", "v")) == {("v", "v"): 1}


def test_directedness_witness_and_rejection():
    C = random_directed_category(5)
    order = directedness_witness(C)
    assert check_witness(C, order) is None
    assert check_witness(C, list(reversed(order))) is not None
    basis = {"a": Morphism("x", "y", 0, "a"), "b": Morphism("y", "x", 0, "b"),
             "ix": Morphism("x", "x", 0, "ix"), "iy": Morphism("y", "y", 0, "iy")}
    cyc = FiniteDgCategory(["x", "y"], basis, {}, {("b", "a"): {}, ("a", "b"): {}}, {"x": "ix", "y": "iy"})
    with pytest.raises(NotDirectedError):
        directedness_witness(cyc)


def test_malformed_identity():
    basis = {"e": Morphism("x", "x", 1, "e")}
    with pytest.raises(MalformedCategoryError):
        FiniteDgCategory(["x"], basis, {}, {}, {"x": "e"})


def test_path_category_rejects_bad_differential():
    gens = {"a": ("0", "1", -1), "b": ("1", "2", 0)}
    # d(a) must stay inside hom(0, 1); b lives in hom(1, 2)
    with pytest.raises(DgCategoryError):
        path_category(["0", "1", "2"], gens, {"a": {("b",): 1}})


@pytest.mark.parametrize("seed", range(10))
def test_random_categories_are_valid_and_graded(seed):
    C = random_directed_category(seed)
    assert validate(C).ok
    assert len({C.degree(k) for k in C.basis_keys()}) >= 2
    assert any(C.d(k) for k in C.basis_keys())
    ensure_directed(C)


# mutate-and-check: a single corrupted structure constant must be reported

def test_mutation_in_differential_is_caught():
    C, _ = collapse_fixture()
    D = _mutate(C, "_diff", "w", {"u": 1})   # d(w) = u makes d(d(v)) = u
    rep = validate(D)
    assert not rep.checks["d2"].passed
    assert rep.checks["d2"].counterexample == ("v",)


def test_mutation_in_composition_is_caught():
    C = random_directed_category(3)
    pairs = [(g, f) for (g, f), v in C._comp.items() if v and not C.is_identity(g) and not C.is_identity(f)]
    g, f = pairs[0]
    ((h, c),) = C.compose(g, f).items()
    D = _mutate(C, "_comp", (g, f), {h: 2 * c})
    assert not validate(D).ok


def test_mutation_in_unit_is_caught():
    C = interval(2)
    D = _mutate(C, "_comp", ("id_1", "0->1"), {"0->1": 2})
    rep = validate(D)
    assert not rep.checks["units"].passed
    assert rep.checks["units"].counterexample == ("id_1", "0->1")


def test_mutation_in_associativity_is_caught():
    C = interval(3)
    D = _mutate(C, "_comp", ("2->3", "0->2"), {})
    rep = validate(D, checks=("associativity",))
    assert not rep.checks["associativity"].passed
