"""Acceptance gate: the nine headline claims, exact values, stated budgets.

Each test prints one PASS line with its runtime; a failed assertion keeps
the line unprinted and surfaces as an ordinary pytest failure.
"""

import random
from time import perf_counter

from amcc.affine import classify, ns_dimension
from amcc.csp import reconstruct_tables
from amcc.lp import contextual_fraction
from amcc.model import (
    corpus,
    corpus_names,
    ghz_322,
    is_maximal_marginals,
    pr_box,
)
from amcc.parity import (
    build_symmetric_model,
    column_vectors,
    gf2_basis,
    parity_satisfiable,
    parity_scan,
    parity_system_from_vector,
)
from amcc.possibilistic import strong_contextuality, support_of
from amcc.rational import ONE, rat
from amcc.scenario import bell_scenario
from amcc.verify import chsh_cf, covering_ncf, random_no_signaling_model

REFERENCE_VECTOR = 0x1C00


def _report(n, claim, t0, budget):
    elapsed = perf_counter() - t0
    assert elapsed < budget, f"criterion {n} took {elapsed:.2f}s, budget {budget}s"
    print(f"PASS criterion {n}: {claim} ({elapsed:.2f}s < {budget:g}s)")


def test_criterion_1_pr_boxes():
    t0 = perf_counter()
    for k in range(8):
        model = pr_box(k)
        assert contextual_fraction(model).cf == ONE
        mm, _ = is_maximal_marginals(model)
        assert mm is True
    _report(1, "eight PR boxes have cf = 1 with maximal marginals", t0, 1)


def test_criterion_2_ghz():
    t0 = perf_counter()
    model = ghz_322()
    assert contextual_fraction(model).cf == ONE
    mm, _ = is_maximal_marginals(model)
    assert mm is True
    _report(2, "the (3,2,2) parity model has cf = 1 with maximal marginals", t0, 1)


def test_criterion_3_full_scan_at_four_parties():
    sc = bell_scenario(4, 2, 2)
    t0 = perf_counter()
    scan = parity_scan(sc, threads=1)
    brute = perf_counter() - t0
    assert brute < 60, f"brute-force scan took {brute:.2f}s, budget 60s"
    assert scan.total == 65536
    assert scan.unsatisfiable == 65504
    assert scan.satisfiable == 32 == 1 << scan.rank
    assert scan.rank == 5

    t1 = perf_counter()
    basis = gf2_basis(column_vectors(sc))
    n_sat = 0
    for v in range(1 << 16):
        w = v
        while w:
            h = w.bit_length() - 1
            if h not in basis:
                break
            w ^= basis[h]
        if w == 0:
            n_sat += 1
    decider = perf_counter() - t1
    assert decider < 5, f"elimination decider took {decider:.2f}s, budget 5s"
    assert (1 << 16) - n_sat == 65504
    print(
        "PASS criterion 3: 65504 of 65536 four-party parity vectors are "
        f"unsatisfiable (brute {brute:.2f}s < 60s, decider {decider:.2f}s < 5s)"
    )


def test_criterion_4_reference_vector_model():
    t0 = perf_counter()
    system = parity_system_from_vector(bell_scenario(4, 2, 2), REFERENCE_VECTOR)
    assert parity_satisfiable(system) is False
    model = build_symmetric_model(system)
    assert contextual_fraction(model).cf == ONE
    mm, _ = is_maximal_marginals(model)
    assert mm is True
    eighth = rat(1, 8)
    for row in model.tables:
        for w in row:
            assert w == 0 or w == eighth
    _report(
        4,
        "the 0x1c00 symmetric model has cf = 1, maximal marginals, entries 1/8",
        t0,
        5,
    )


def test_criterion_5_affine_dimensions():
    t0 = perf_counter()
    assert ns_dimension(bell_scenario(4, 2, 2)) == 80
    assert ns_dimension(bell_scenario(2, 2, 2)) == 8
    _report(5, "no-signaling dimensions are 80 at (4,2,2) and 8 at (2,2,2)", t0, 10)


def test_criterion_6_reference_tables():
    t0 = perf_counter()
    family, report = reconstruct_tables()
    assert report.ok is True
    assert report.dimension == 1
    assert report.diffs == ()
    assert report.bounds == (rat(1, 8), rat(1, 4))
    mid = classify(family.at(rat(3, 16)))
    assert mid.verdict == "non-AMCC"
    assert mid.cf == ONE and mid.maximal_marginals is False
    low = classify(family.at(rat(1, 8)))
    assert low.verdict == "AMCC"
    _report(
        6,
        "the frozen tables reconstruct exactly on [1/8, 1/4]; non-AMCC at "
        "3/16, AMCC at 1/8",
        t0,
        60,
    )


def test_criterion_7_fraction_one_iff_strongly_contextual():
    t0 = perf_counter()
    pool = [corpus(name) for name in corpus_names()]
    sc2, sc3 = bell_scenario(2, 2, 2), bell_scenario(3, 2, 2)
    rng = random.Random(101)
    pool += [random_no_signaling_model(sc2, rng) for _ in range(60)]
    rng = random.Random(202)
    pool += [random_no_signaling_model(sc3, rng) for _ in range(60)]
    assert len(pool) >= 116  # full corpus plus at least 100 random models
    for model in pool:
        maximal = contextual_fraction(model).cf == ONE
        sc_verdict, _ = strong_contextuality(support_of(model))
        assert maximal == sc_verdict
    _report(
        7,
        f"cf = 1 iff strongly contextual on {len(pool)} models",
        t0,
        300,
    )


def test_criterion_8_lp_oracle_agreement():
    t0 = perf_counter()
    pool = [
        corpus(name)
        for name in corpus_names()
        if corpus(name).scenario == bell_scenario(2, 2, 2)
    ]
    assert len(pool) == 11
    rng = random.Random(303)
    pool += [
        random_no_signaling_model(bell_scenario(2, 2, 2), rng) for _ in range(60)
    ]
    for model in pool:
        simplex = contextual_fraction(model).ncf
        certified, _ = covering_ncf(model)
        assert simplex == certified
        assert simplex == ONE - chsh_cf(model)
    _report(
        8,
        f"simplex NCF matches the certified covering oracle on {len(pool)} "
        "models",
        t0,
        120,
    )


def test_criterion_9_two_party_scan_recovers_the_pr_boxes():
    t0 = perf_counter()
    sc = bell_scenario(2, 2, 2)
    scan = parity_scan(sc, examples=16)
    assert scan.unsatisfiable == 8
    assert scan.examples == (0x1, 0x2, 0x4, 0x7, 0x8, 0xB, 0xD, 0xE)
    seen = set()
    for v in scan.examples:
        p = [(v >> ci) & 1 for ci in range(4)]
        k = 4 * (p[2] ^ p[0]) + 2 * (p[1] ^ p[0]) + p[0]
        model = build_symmetric_model(parity_system_from_vector(sc, v))
        assert model == pr_box(k)
        seen.add(k)
    assert seen == set(range(8))
    _report(
        9,
        "the 8 unsatisfiable (2,2,2) vectors map onto the 8 PR boxes",
        t0,
        1,
    )
