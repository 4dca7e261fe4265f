import itertools

import pytest
from hypothesis import given, strategies as st

from dipstr.errors import AlleleParseError, InputError
from dipstr.genetics import (
    AlleleDatabase,
    CaseInput,
    DipStrAllele,
    Exclusion,
    Genotype,
    NoAllele,
    Observation,
    OneAllele,
    TwoAlleles,
    VictimHeterozygous,
    augment,
    classify_case,
    observe,
    parse_allele,
)

from conftest import make_case

A = parse_allele


class TestAllele:
    @pytest.mark.parametrize("label, dip, str_id", [("L2", "L", "2"), ("S11", "S", "11"), ("L13.2", "L", "13.2")])
    def test_parse(self, label, dip, str_id):
        allele = parse_allele(label)
        assert allele == DipStrAllele(dip, str_id)
        assert parse_allele(str(allele)) == allele

    @pytest.mark.parametrize("label", ["X7", "L", "", "l2", "S 1", "Q9"])
    def test_parse_rejects(self, label):
        with pytest.raises(AlleleParseError, match="malformed"):
            parse_allele(label)

    def test_order(self):
        assert A("L9") < A("S1")
        assert A("L13") < A("L2")  # lexicographic on the STR id
        assert sorted([A("S2"), A("L2"), A("S11")]) == [A("L2"), A("S11"), A("S2")]


class TestGenotype:
    def test_canonical_order(self):
        g = Genotype.of("S12", "L2")
        assert (g.a1, g.a2) == (A("L2"), A("S12"))
        assert g == Genotype.of("L2", "S12")

    def test_dip_homozygous(self):
        assert Genotype.of("L2", "L13").dip_homozygous()
        assert not Genotype.of("L2", "S13").dip_homozygous()


class TestObservation:
    def test_ordering(self):
        o = Observation.of(["L13", "L2"])
        assert (o.o1, o.o2) == (A("L13"), A("L2"))
        o = Observation(A("L2"), A("L13"))
        assert o.o1 < o.o2

    def test_rejects_mixed_classes(self):
        with pytest.raises(InputError):
            Observation.of(["L2", "S2"])

    def test_rejects_o2_alone(self):
        with pytest.raises(InputError):
            Observation(None, A("L2"))


class TestAugment:
    def test_empty_base(self):
        adb = augment(AlleleDatabase(), Genotype.of("S1", "S2"), Genotype.of("L1", "L1"))
        assert (adb.n, adb.n_L, adb.n_S) == (0, 2, 2)
        assert (adb.k_b_S, adb.n1_S) == (2, 2)
        assert (adb.k_b_L, adb.n1_L) == (1, 0)

    def test_direct_tally(self):
        adb = augment(AlleleDatabase.from_labels(["L2"]), Genotype.of("L2", "L13"), Genotype.of("S11", "S11"))
        assert dict(adb.counts_L) == {A("L2"): 2, A("L13"): 1}
        assert adb.n1_L == 1
        assert dict(adb.counts_S) == {A("S11"): 2}

    def test_table4_case1(self, mid1950_db, case1):
        adb = augment(mid1950_db, case1.suspect, case1.victim)
        assert len(mid1950_db) == 206
        assert (adb.n_L, adb.k_b_L, adb.n1_L) == (81, 6, 2)
        assert adb.n_L + adb.n_S == adb.n + 4
        assert adb.k_b_L + adb.k_b_S == 11


labels = st.sampled_from(["L1", "L2", "L3", "S1", "S2", "S3"]).map(parse_allele)
genotypes = st.tuples(labels, labels).map(lambda t: Genotype(*t))


@given(st.lists(labels, max_size=30), genotypes, genotypes)
def test_augment_invariants(entries, suspect, victim):
    adb = augment(AlleleDatabase(tuple(entries)), suspect, victim)
    assert adb.n_L + adb.n_S == adb.n + 4
    for dip in "LS":
        assert sum(adb.counts(dip).values()) == adb.n_side(dip)
        assert adb.n1(dip) <= adb.k_b(dip) <= adb.n_side(dip)
    for a in suspect.alleles + victim.alleles:
        assert adb.counts(a.dip)[a] >= 1


class TestObserve:
    def test_two_alleles(self):
        assert observe(Genotype.of("L1", "L1"), Genotype.of("S4", "S3")) == Observation.of(["S3", "S4"])

    def test_str_homozygous_minor_gives_one(self):
        assert observe(Genotype.of("L1", "L1"), Genotype.of("S4", "S4")).alleles == (A("S4"),)

    def test_dip_het_minor(self):
        assert observe(Genotype.of("L1", "L2"), Genotype.of("S4", "L9")).alleles == (A("S4"),)

    def test_same_class_minor(self):
        assert observe(Genotype.of("L1", "L1"), Genotype.of("L4", "L9")) == Observation()

    @pytest.mark.parametrize("minor", [("S1", "S2"), ("L1", "S1"), ("L3", "L3")])
    def test_het_victim(self, minor):
        assert observe(Genotype.of("L1", "S1"), Genotype.of(*minor)) == Observation()


@given(genotypes, genotypes)
def test_observe_output_is_valid(victim, minor):
    obs = observe(victim, minor)
    assert len(obs) <= 2
    if len(obs) == 2:
        assert obs.o1 < obs.o2 and obs.o1.dip == obs.o2.dip
    if victim.dip_homozygous():
        assert all(a.dip != victim.a1.dip for a in obs.alleles)
    else:
        assert len(obs) == 0
    # constructing the case must accept the observation
    CaseInput(victim, minor, obs)


def test_prosecution_consistency_exhaustive():
    universe = [A(x) for x in ["L1", "L2", "S1", "S2"]]
    pairs = list(itertools.combinations_with_replacement(universe, 2))
    for v, s in itertools.product(pairs, pairs):
        victim, suspect = Genotype(*v), Genotype(*s)
        kind = classify_case(CaseInput(victim, suspect, observe(victim, suspect)))
        assert not isinstance(kind, Exclusion)


@given(genotypes, genotypes, st.lists(labels, max_size=10))
def test_relabel_commutes(victim, minor, entries):
    mapping = {"1": "7", "2": "1", "3": "22"}
    assert observe(victim, minor).relabel(mapping) == observe(victim.relabel(mapping), minor.relabel(mapping))
    adb = augment(AlleleDatabase(tuple(entries)), minor, victim)
    adb2 = augment(AlleleDatabase(tuple(entries)).relabel(mapping), minor.relabel(mapping), victim.relabel(mapping))
    for dip in "LS":
        renamed = {a.relabel(mapping): c for a, c in adb.counts(dip).items()}
        assert renamed == dict(adb2.counts(dip))


class TestClassify:
    def test_case1(self, case1):
        assert classify_case(case1) == TwoAlleles(A("L13"), A("L2"), "L")

    def test_case2(self, case2):
        assert classify_case(case2) == OneAllele(A("L2"), "L")

    def test_exclusion(self):
        case = make_case(("S11", "S11"), ("L2", "L13"), ["L2"])
        assert isinstance(classify_case(case), Exclusion)

    def test_no_allele(self):
        assert classify_case(make_case(("S1", "S1"), ("S2", "S3"), [])) == NoAllele("L")

    def test_victim_het(self):
        assert classify_case(make_case(("S1", "L1"), ("S2", "S3"), [])) == VictimHeterozygous()

    def test_observation_of_victim_class_rejected(self):
        with pytest.raises(InputError):
            make_case(("S1", "S1"), ("S2", "L3"), ["S2"])

    def test_het_victim_with_observation_rejected(self):
        with pytest.raises(InputError):
            make_case(("S1", "L1"), ("S2", "S3"), ["S2"])
