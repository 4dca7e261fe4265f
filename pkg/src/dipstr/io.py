"""Reading databases and case files, writing records and sweep CSVs."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import AlleleParseError, InputError
from .genetics import AlleleDatabase, CaseInput, Genotype, Observation, parse_allele
from .lr import LrResult, SweepRow

SWEEP_HEADER = ("method", "alpha", "m", "k_prior", "log10_lr", "status")

PathLike = Union[str, Path]


def fixture_path(name: str) -> Path:
    """Path of a data file shipped with the package (e.g. ``"case1.json"``)."""
    return Path(str(resources.files("dipstr") / "data" / name))


def parse_database(text: str, source: str = "<string>") -> AlleleDatabase:
    """One allele label per line; ``#`` starts a comment, blank lines are skipped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            entries.append(parse_allele(line))
        except AlleleParseError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
    return AlleleDatabase(tuple(entries), source)


def read_database(path: PathLike) -> AlleleDatabase:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read database {path}: {exc}") from None
    return parse_database(text, str(path))


def format_database(db: AlleleDatabase) -> str:
    """Canonical text form: sorted labels, one per line."""
    return "".join(f"{a}\n" for a in sorted(db.entries))


def _case_from_obj(obj, where: str) -> CaseInput:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: case must be a JSON object")
    try:
        victim, suspect = obj["victim"], obj["suspect"]
        observed = obj.get("observed", [])
        locus = str(obj.get("locus", ""))
    except KeyError as exc:
        raise InputError(f"{where}: missing field {exc}") from None
    for name, value, sizes in (("victim", victim, (2,)), ("suspect", suspect, (2,)),
                               ("observed", observed, (0, 1, 2))):
        if not isinstance(value, list) or len(value) not in sizes:
            raise InputError(f"{where}: field {name!r} must be a list of {sizes} labels")
    try:
        return CaseInput(
            Genotype.of(*victim),
            Genotype.of(*suspect),
            Observation.of(observed),
            locus,
        )
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_cases(text: str, source: str = "<string>") -> list[CaseInput]:
    """A single case object or a JSON array of them (one per locus)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if isinstance(data, list):
        if not data:
            raise InputError(f"{source}: empty case list")
        return [_case_from_obj(obj, f"{source}[{i}]") for i, obj in enumerate(data)]
    return [_case_from_obj(data, source)]


def read_cases(path: PathLike) -> list[CaseInput]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read case file {path}: {exc}") from None
    return parse_cases(text, str(path))


def case_to_obj(case: CaseInput) -> dict:
    return {
        "locus": case.locus,
        "victim": [str(a) for a in case.victim.alleles],
        "suspect": [str(a) for a in case.suspect.alleles],
        "observed": [str(a) for a in case.observation.alleles],
    }


def _fmt(x) -> str:
    if isinstance(x, bool) or isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


def format_record(result: LrResult, prior) -> str:
    """Human-readable ``key=value`` line with 6 significant digits."""
    fields = [
        ("locus", result.locus or "-"),
        ("method", result.method),
        ("alpha", float(prior.alpha)),
        ("m", int(prior.m)),
        ("k_prior", prior.k_prior),
        ("denominator", result.denominator),
        ("log10_lr", result.log10_lr),
        ("status", result.status),
    ]
    fields += sorted(result.diagnostics.items())
    return " ".join(f"{k}={_fmt(v)}" for k, v in fields)


def _csv_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def write_sweep_csv(rows: Iterable[SweepRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([str(r.method), repr(float(r.alpha)), r.m, r.k_prior,
                         _csv_float(r.log10_lr), r.status])
