"""DIP-STR alleles, genotypes, databases and the trace observation channel.

A DIP-STR allele is a pair (DIP class, STR variant). The DIP class is ``"L"``
(long, insertion) or ``"S"`` (short, deletion). When the major contributor
(the victim) is DIP-homozygous, only alleles of the *other* DIP class can be
amplified from the minor contributor, which is what :func:`observe` encodes.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .errors import AlleleParseError, InputError

DIP_CLASSES = ("L", "S")

_LABEL_RE = re.compile(r"^([LS])(\S+)$")


def opposite(dip: str) -> str:
    return "S" if dip == "L" else "L"


@dataclass(frozen=True, order=True)
class DipStrAllele:
    """A DIP-STR allele.

    Ordering is by DIP class (L before S) and then by the STR identifier
    compared as a string, so ``L13 < L2``.
    """

    dip: str
    str_id: str

    def __post_init__(self):
        if self.dip not in DIP_CLASSES:
            raise AlleleParseError(f"invalid DIP class {self.dip!r}")
        if not self.str_id or any(c.isspace() for c in self.str_id):
            raise AlleleParseError(f"invalid STR identifier {self.str_id!r}")

    def __str__(self) -> str:
        return f"{self.dip}{self.str_id}"

    def relabel(self, mapping: Mapping[str, str]) -> "DipStrAllele":
        return DipStrAllele(self.dip, mapping.get(self.str_id, self.str_id))

    def mirrored(self) -> "DipStrAllele":
        return DipStrAllele(opposite(self.dip), self.str_id)


def parse_allele(label: str) -> DipStrAllele:
    """Parse a label such as ``"L2"`` or ``"S11"``."""
    text = label.strip() if isinstance(label, str) else label
    if not isinstance(text, str):
        raise AlleleParseError(f"allele label must be a string, got {label!r}")
    match = _LABEL_RE.match(text)
    if match is None:
        raise AlleleParseError(f"malformed allele label {label!r}")
    return DipStrAllele(match.group(1), match.group(2))


def _as_allele(value: Union[str, DipStrAllele]) -> DipStrAllele:
    return value if isinstance(value, DipStrAllele) else parse_allele(value)


@dataclass(frozen=True)
class Genotype:
    """Unordered pair of alleles, stored with ``a1 <= a2``."""

    a1: DipStrAllele
    a2: DipStrAllele

    def __post_init__(self):
        if self.a2 < self.a1:
            first, second = self.a2, self.a1
            object.__setattr__(self, "a1", first)
            object.__setattr__(self, "a2", second)

    @classmethod
    def of(cls, first: Union[str, DipStrAllele], second: Union[str, DipStrAllele]) -> "Genotype":
        return cls(_as_allele(first), _as_allele(second))

    def dip_homozygous(self) -> bool:
        return self.a1.dip == self.a2.dip

    @property
    def alleles(self) -> tuple[DipStrAllele, DipStrAllele]:
        return (self.a1, self.a2)

    def relabel(self, mapping: Mapping[str, str]) -> "Genotype":
        return Genotype(self.a1.relabel(mapping), self.a2.relabel(mapping))

    def mirrored(self) -> "Genotype":
        return Genotype(self.a1.mirrored(), self.a2.mirrored())

    def __str__(self) -> str:
        return f"{self.a1}-{self.a2}"


@dataclass(frozen=True)
class Observation:
    """Alleles of the minor contributor seen in the trace (zero, one or two).

    Two observed alleles are kept in increasing order and share a DIP class.
    """

    o1: Optional[DipStrAllele] = None
    o2: Optional[DipStrAllele] = None

    def __post_init__(self):
        if self.o2 is not None:
            if self.o1 is None:
                raise InputError("o2 given without o1")
            if self.o1.dip != self.o2.dip:
                raise InputError("observed alleles must share a DIP class")
            if self.o2 < self.o1:
                first, second = self.o2, self.o1
                object.__setattr__(self, "o1", first)
                object.__setattr__(self, "o2", second)
            if self.o1 == self.o2:
                raise InputError("the two observed alleles must be distinct")

    @classmethod
    def of(cls, labels: Iterable[Union[str, DipStrAllele]]) -> "Observation":
        alleles = sorted({_as_allele(x) for x in labels})
        if len(alleles) > 2:
            raise InputError(f"at most two observed alleles, got {len(alleles)}")
        return cls(*alleles)

    @property
    def alleles(self) -> tuple[DipStrAllele, ...]:
        return tuple(a for a in (self.o1, self.o2) if a is not None)

    def __len__(self) -> int:
        return len(self.alleles)

    def relabel(self, mapping: Mapping[str, str]) -> "Observation":
        return Observation.of(a.relabel(mapping) for a in self.alleles)

    def mirrored(self) -> "Observation":
        return Observation.of(a.mirrored() for a in self.alleles)


@dataclass(frozen=True)
class AlleleDatabase:
    entries: tuple[DipStrAllele, ...] = ()
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def from_labels(cls, labels: Iterable[str], source: str = "") -> "AlleleDatabase":
        return cls(tuple(parse_allele(x) for x in labels), source)

    def __len__(self) -> int:
        return len(self.entries)

    def counts(self) -> Counter:
        return Counter(self.entries)

    def relabel(self, mapping: Mapping[str, str]) -> "AlleleDatabase":
        return AlleleDatabase(tuple(a.relabel(mapping) for a in self.entries), self.source)

    def mirrored(self) -> "AlleleDatabase":
        return AlleleDatabase(tuple(a.mirrored() for a in self.entries), self.source)


@dataclass(frozen=True, eq=False)
class AugmentedDatabase:
    """Reference database plus the four alleles of suspect and victim,
    reduced to the per-class counts the posterior depends on."""

    base: AlleleDatabase
    suspect: Genotype
    victim: Genotype
    counts_L: Mapping[DipStrAllele, int] = field(default_factory=dict)
    counts_S: Mapping[DipStrAllele, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.base)

    def counts(self, dip: str) -> Mapping[DipStrAllele, int]:
        return self.counts_L if dip == "L" else self.counts_S

    def n_side(self, dip: str) -> int:
        return sum(self.counts(dip).values())

    def k_b(self, dip: str) -> int:
        return len(self.counts(dip))

    def n1(self, dip: str) -> int:
        return sum(1 for c in self.counts(dip).values() if c == 1)

    n_L = property(lambda self: self.n_side("L"))
    n_S = property(lambda self: self.n_side("S"))
    k_b_L = property(lambda self: self.k_b("L"))
    k_b_S = property(lambda self: self.k_b("S"))
    n1_L = property(lambda self: self.n1("L"))
    n1_S = property(lambda self: self.n1("S"))


def augment(base: AlleleDatabase, suspect: Genotype, victim: Genotype) -> AugmentedDatabase:
    tally = Counter(base.entries)
    tally.update(suspect.alleles)
    tally.update(victim.alleles)
    by_class = {
        dip: MappingProxyType({a: tally[a] for a in sorted(tally) if a.dip == dip})
        for dip in DIP_CLASSES
    }
    return AugmentedDatabase(base, suspect, victim, by_class["L"], by_class["S"])


def observe(victim: Genotype, minor: Genotype) -> Observation:
    """Alleles of ``minor`` visible in a mixture dominated by ``victim``.

    Only a DIP-homozygous victim yields information; the visible alleles are
    the minor's alleles of the other DIP class, deduplicated.
    """
    if not victim.dip_homozygous():
        return Observation()
    target = opposite(victim.a1.dip)
    return Observation.of(a for a in minor.alleles if a.dip == target)


# Case classification --------------------------------------------------------


@dataclass(frozen=True)
class TwoAlleles:
    i: DipStrAllele
    j: DipStrAllele
    side: str


@dataclass(frozen=True)
class OneAllele:
    i: DipStrAllele
    side: str


@dataclass(frozen=True)
class NoAllele:
    side: str

    @property
    def victim_side(self) -> str:
        return opposite(self.side)


@dataclass(frozen=True)
class VictimHeterozygous:
    pass


@dataclass(frozen=True)
class Exclusion:
    expected: Observation


CaseKind = Union[TwoAlleles, OneAllele, NoAllele, VictimHeterozygous, Exclusion]


@dataclass(frozen=True)
class CaseInput:
    victim: Genotype
    suspect: Genotype
    observation: Observation
    locus: str = ""

    def __post_init__(self):
        observed = self.observation.alleles
        if not self.victim.dip_homozygous():
            if observed:
                raise InputError(
                    f"locus {self.locus!r}: a DIP-heterozygous victim masks the minor "
                    "contributor, no alleles can be observed"
                )
        elif any(a.dip == self.victim.a1.dip for a in observed):
            raise InputError(
                f"locus {self.locus!r}: observed alleles must belong to the DIP class "
                f"not carried by the victim ({opposite(self.victim.a1.dip)})"
            )

    def relabel(self, mapping: Mapping[str, str]) -> "CaseInput":
        return CaseInput(
            self.victim.relabel(mapping),
            self.suspect.relabel(mapping),
            self.observation.relabel(mapping),
            self.locus,
        )

    def mirrored(self) -> "CaseInput":
        return CaseInput(
            self.victim.mirrored(),
            self.suspect.mirrored(),
            self.observation.mirrored(),
            self.locus,
        )


def classify_case(case: CaseInput) -> CaseKind:
    if not case.victim.dip_homozygous():
        return VictimHeterozygous()
    expected = observe(case.victim, case.suspect)
    if expected != case.observation:
        return Exclusion(expected)
    side = opposite(case.victim.a1.dip)
    observed = case.observation.alleles
    if len(observed) == 2:
        return TwoAlleles(observed[0], observed[1], side)
    if len(observed) == 1:
        return OneAllele(observed[0], side)
    return NoAllele(side)
