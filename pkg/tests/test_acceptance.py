"""
Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(also collected under "acceptance criteria" in the terminal summary).
"""

import time
from functools import lru_cache

import pytest

from dgtwist.baroracle import compare_all
from dgtwist.dgcat import collapse_fixture, interval, is_quasi_equivalence_on_homs, tensor, validate
from dgtwist.exactlinalg import GF, QQ, cohomology_dims
from dgtwist.operad import Ordinal2, augmentation, check_contractible, flat_object, operad_complex, sweep
from dgtwist.twist import (TwistedTensor, check_composite_epsilon, check_square, projection,
                           tensor_map_on_second_factor, twisted_map_on_second_factor)

from helpers import SEEDS, base_categories, random_associativity_failures, random_leibniz_failures, random_twists

F32003 = GF(32003)
SWEEP_K, SWEEP_SUM = 3, 5


@lru_cache(maxsize=None)
def theorem3_instances():
    """(name, n, I_n ⊗̃ C) for n in {0, 1, 2} and every base category."""
    return [(name, n, TwistedTensor(n, C)) for name, C in base_categories() for n in (0, 1, 2)]


@lru_cache(maxsize=None)
def sweep_results(field_name):
    field = QQ if field_name == "Q" else F32003
    t = time.perf_counter()
    entries = sweep(SWEEP_K, SWEEP_SUM, field)
    return entries, time.perf_counter() - t


@lru_cache(maxsize=None)
def sweep_categories():
    """Every level D_j built for criteria 1 and 2, keyed by ordinal."""
    return {str(o): operad_complex(o, check=False) for o in (e.ordinal for e in sweep_results("Q")[0])}


def test_criterion_1_golden_smallest_component(criterion):
    t = time.perf_counter()
    cert = check_contractible(Ordinal2((1, 1)))
    oc = operad_complex(Ordinal2((1, 1)))
    elapsed = time.perf_counter() - t
    d = oc.complex.differential(-1)
    column = [int(row[0]) for row in d.to_dense()]
    ok = (oc.dims() == {-1: 1, 0: 2}
          and sorted(column) == [-1, 1]
          and cert.ranks == {-1: 1}
          and cohomology_dims(oc.complex) == {-1: 0, 0: 1}
          and cert.verdict
          and elapsed < 1.0)
    criterion(1, ok, f"O(1,1) dims {oc.dims()}, d = {column}, H {cert.H}, {elapsed:.3f}s (< 1 s)")
    assert ok


def test_criterion_2_contractibility_sweep(criterion):
    entries, elapsed = sweep_results("Q")
    aborted = [str(e.ordinal) for e in entries if e.certificate is None]
    failed = [str(e.ordinal) for e in entries if e.certificate is not None and not e.passed]
    nonzero_aug = all(e.certificate.augmentation != 0 for e in entries if e.certificate)
    ok = not aborted and not failed and nonzero_aug and elapsed < 300
    criterion(2, ok, f"{len(entries)} ordinals (k <= {SWEEP_K}, sum <= {SWEEP_SUM}): "
                     f"{len(entries) - len(failed) - len(aborted)} contractible, {len(failed)} failed, "
                     f"{len(aborted)} aborted, {elapsed:.1f}s (< 300 s)")
    assert ok


def test_criterion_3_projection_is_quasi_iso(criterion):
    t = time.perf_counter()
    bad, pairs = [], 0
    for name, n, W in theorem3_instances():
        cert = is_quasi_equivalence_on_homs(projection(W))
        pairs += len(cert.pairs)
        if not cert.ok:
            bad.append(f"n={n} {name}")
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 120 and len(theorem3_instances()) == 3 * (4 + 1 + len(SEEDS))
    criterion(3, ok, f"{len(theorem3_instances())} instances, {pairs} hom pairs, "
                     f"{len(bad)} not quasi-isomorphic, {elapsed:.1f}s (< 120 s)")
    assert ok, bad[:5]


def test_criterion_4_oracle_equivalence(criterion):
    bad, checked = [], 0
    for name, n, W in theorem3_instances():
        for r in compare_all(W):
            checked += 1
            if not r.ok:
                bad.append((name, n, r.a, r.b, r.x, r.y))
    ok = not bad
    criterion(4, ok, f"{checked} (a, b, x, y) hom pairs compared with the bar reconstruction, "
                     f"{len(bad)} disagreements")
    assert ok, bad[:5]


def test_criterion_5_axiom_suites(criterion):
    failures, categories, composites = [], 0, 0
    built = [(f"n={n} {name}", W) for name, n, W in theorem3_instances()]
    for o, oc in sweep_categories().items():
        built += [(f"O({o}) level {j + 1}", D) for j, D in enumerate(oc.levels)]
    for label, D in built:
        categories += 1
        rep = validate(D)
        if not rep.ok:
            failures.append(f"{label}: {rep.summary()}")
        if isinstance(D, TwistedTensor):
            checked, first_bad = check_composite_epsilon(D)
            composites += checked
            if first_bad is not None:
                failures.append(f"{label}: composite epsilon {first_bad}")
    pairs = triples = random_bad = 0
    for s, W, rng in random_twists(SEEDS):
        done, bad = random_leibniz_failures(W, rng, 60)
        pairs, random_bad = pairs + done, random_bad + bad
        done, bad = random_associativity_failures(W, rng, 60)
        triples, random_bad = triples + done, random_bad + bad
    ok = not failures and random_bad == 0 and pairs >= 1000 and triples >= 1000
    criterion(5, ok, f"{categories} categories exhaustive, {composites} composite-epsilon checks, "
                     f"{pairs} random pairs, {triples} random triples, "
                     f"{len(failures) + random_bad} failures")
    assert ok, failures[:5]


def test_criterion_6_collapse_square(criterion):
    C, F = collapse_fixture()
    base = is_quasi_equivalence_on_homs(F).ok
    WC, WD = TwistedTensor(1, C), TwistedTensor(1, F.target)
    G = twisted_map_on_second_factor(1, F, WC, WD)
    H = tensor_map_on_second_factor(1, F)
    twisted = is_quasi_equivalence_on_homs(G).ok
    square = check_square(projection(WC, H.source), projection(WD, H.target), G, H)
    ok = base and twisted and square is None
    criterion(6, ok, f"F quasi-equivalence {base}, Id⊗̃F quasi-equivalence {twisted}, "
                     f"square commutes on {len(WC.basis_keys())} words: {square is None}")
    assert ok


def _leq(x, y):
    return all(a <= b for a, b in zip(flat_object(x), flat_object(y)))


def test_criterion_7_euler_characteristic(criterion):
    bad, pairs = [], 0
    for name, n, W in theorem3_instances():
        T = tensor(interval(n), W.base)
        for (i, x) in W.objects:
            for (j, y) in W.objects:
                pairs += 1
                chi = W.hom_complex((i, x), (j, y)).euler_characteristic()
                if chi != T.hom_complex((str(i), x), (str(j), y)).euler_characteristic():
                    bad.append((name, n, i, x, j, y))
    # iterated products of intervals: the classical hom is k or 0
    for o, oc in sweep_categories().items():
        D = oc.category
        for x in D.objects:
            for y in D.objects:
                pairs += 1
                if D.hom_complex(x, y).euler_characteristic() != int(_leq(x, y)):
                    bad.append((o, x, y))
    entries, _ = sweep_results("Q")
    chi_one = all(e.certificate.euler_characteristic == 1 for e in entries if e.certificate)
    ok = not bad and chi_one
    criterion(7, ok, f"{pairs} hom pairs match the classical hom, {len(bad)} mismatches; "
                     f"chi(O) = 1 on all {len(entries)} sweep ordinals: {chi_one}")
    assert ok, bad[:5]


def test_criterion_8_field_robustness(criterion):
    q, _ = sweep_results("Q")
    p, _ = sweep_results("F")
    golden_q = check_contractible(Ordinal2((1, 1))).H
    golden_p = check_contractible(Ordinal2((1, 1)), F32003).H
    mismatched = [str(a.ordinal) for a, b in zip(q, p)
                  if a.certificate is None or b.certificate is None or a.certificate.H != b.certificate.H]
    ok = golden_q == golden_p and not mismatched and len(q) == len(p)
    criterion(8, ok, f"H dims over Q and F_32003 agree on O(1,1) and {len(q) - len(mismatched)}/{len(q)} "
                     f"sweep ordinals")
    assert ok, mismatched[:5]
