"""Parsing and filtering of raw roll-call vote tables.

Input contract (UTF-8, comma-delimited, RFC-4180 quoting):

* votes.csv  -- header ``voter_id,<rollcall_id_1>,...``; one row per voter;
  cells in {FOR, AGAINST, ABSTAIN, ABSENT}, case-insensitive; blank cells
  default to ABSENT (counted as warnings).
* voters.csv -- ``voter_id,name,country,party,group``.
* docs.csv   -- ``rollcall_id,title,date,subdomains`` with ``;``-separated
  subdomain labels and ISO dates.

Row and column order of votes.csv is preserved; everything downstream
depends on that stability.
"""

from __future__ import annotations

import csv
import datetime
import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptySelectionError, ParseError


class VoteValue(enum.Enum):
    FOR = 0
    AGAINST = 1
    ABSTAIN = 2
    ABSENT = 3


_TOKEN_TO_VALUE = {v.name: v for v in VoteValue}
PARTICIPATING_CODES = (VoteValue.FOR.value, VoteValue.AGAINST.value, VoteValue.ABSTAIN.value)


@dataclass(frozen=True)
class Voter:
    id: str
    name: str
    country: str
    party: str
    group: str


@dataclass(frozen=True)
class DocumentMeta:
    rollcall_id: str
    title: str
    date: datetime.date
    subdomains: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class VoteMatrix:
    """Dense voters x roll-calls table of vote codes plus metadata."""

    voters: tuple[Voter, ...]
    rollcalls: tuple[DocumentMeta, ...]
    votes: np.ndarray  # int8, shape (n_voters, n_rollcalls)
    warning_count: int = 0

    def __post_init__(self):
        expected = (len(self.voters), len(self.rollcalls))
        if self.votes.shape != expected:
            raise ValueError(f"vote table shape {self.votes.shape} != {expected}")
        if self.votes.size and (self.votes.min() < 0 or self.votes.max() > 3):
            raise ValueError("vote table contains invalid codes")
        self.votes.setflags(write=False)

    @property
    def voter_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.voters)

    @property
    def rollcall_ids(self) -> tuple[str, ...]:
        return tuple(d.rollcall_id for d in self.rollcalls)

    def value(self, voter_id: str, rollcall_id: str) -> VoteValue:
        i = self.voter_ids.index(voter_id)
        j = self.rollcall_ids.index(rollcall_id)
        return VoteValue(int(self.votes[i, j]))

    def voter_by_id(self) -> dict[str, Voter]:
        return {v.id: v for v in self.voters}


def _parse_vote_token(token: str):
    token = token.strip().upper()
    if token == "":
        return None
    value = _TOKEN_TO_VALUE.get(token)
    if value is None:
        raise KeyError(token)
    return value


def _read_voters(path) -> dict[str, Voter]:
    voters = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["voter_id", "name", "country", "party", "group"]:
            raise ParseError("voters.csv header must be voter_id,name,country,party,group", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(f"expected 5 fields, got {len(row)}", path, lineno)
            vid = row[0].strip()
            if vid in voters:
                raise ParseError(f"duplicate voter id {vid!r}", path, lineno)
            voters[vid] = Voter(vid, row[1], row[2].strip(), row[3], row[4].strip())
    return voters


def _read_docs(path, taxonomy=None) -> dict[str, DocumentMeta]:
    docs = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["rollcall_id", "title", "date", "subdomains"]:
            raise ParseError("docs.csv header must be rollcall_id,title,date,subdomains", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", path, lineno)
            rid = row[0].strip()
            if rid in docs:
                raise ParseError(f"duplicate rollcall id {rid!r}", path, lineno)
            try:
                date = datetime.date.fromisoformat(row[2].strip())
            except ValueError:
                raise ParseError(f"bad date {row[2]!r} (want YYYY-MM-DD)", path, lineno)
            subs = frozenset(s.strip() for s in row[3].split(";") if s.strip())
            if taxonomy is not None:
                unknown = subs - set(taxonomy)
                if unknown:
                    raise ParseError(f"unknown subdomain(s) {sorted(unknown)}", path, lineno)
            docs[rid] = DocumentMeta(rid, row[1], date, subs)
    return docs


def parse_vote_table(votes_path, voters_path, docs_path, taxonomy=None) -> VoteMatrix:
    """Parse the three CSVs into a VoteMatrix.

    Unknown vote tokens are rejected with their position; blank cells become
    ABSENT and are tallied in ``warning_count``. The voter/roll-call id sets
    of the metadata files must match votes.csv exactly.
    """
    voter_meta = _read_voters(voters_path)
    doc_meta = _read_docs(docs_path, taxonomy)

    with open(votes_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or header[0].strip() != "voter_id":
            raise ParseError("votes.csv header must start with voter_id", votes_path, 1)
        rollcall_ids = [h.strip() for h in header[1:]]
        if len(set(rollcall_ids)) != len(rollcall_ids):
            raise ParseError("duplicate rollcall id in votes.csv header", votes_path, 1)
        rows = []
        voter_ids = []
        warnings = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(rollcall_ids) + 1:
                raise ParseError(
                    f"row has {len(row) - 1} vote cells, expected {len(rollcall_ids)}",
                    votes_path, lineno)
            vid = row[0].strip()
            if vid in voter_ids:
                raise ParseError(f"duplicate voter id {vid!r}", votes_path, lineno)
            codes = np.empty(len(rollcall_ids), dtype=np.int8)
            for j, cell in enumerate(row[1:]):
                try:
                    value = _parse_vote_token(cell)
                except KeyError:
                    raise ParseError(
                        f"unknown vote token {cell.strip()!r} for voter {vid!r}, "
                        f"rollcall {rollcall_ids[j]!r}", votes_path, lineno)
                if value is None:
                    value = VoteValue.ABSENT
                    warnings += 1
                codes[j] = value.value
            voter_ids.append(vid)
            rows.append(codes)

    missing_voters = [v for v in voter_ids if v not in voter_meta]
    if missing_voters:
        raise ParseError(f"voter id(s) {missing_voters[:3]} missing from voters.csv", votes_path)
    extra_voters = sorted(set(voter_meta) - set(voter_ids))
    if extra_voters:
        raise ParseError(f"voters.csv has id(s) {extra_voters[:3]} absent from votes.csv", voters_path)
    missing_docs = [r for r in rollcall_ids if r not in doc_meta]
    if missing_docs:
        raise ParseError(f"rollcall id(s) {missing_docs[:3]} missing from docs.csv", votes_path)
    extra_docs = sorted(set(doc_meta) - set(rollcall_ids))
    if extra_docs:
        raise ParseError(f"docs.csv has id(s) {extra_docs[:3]} absent from votes.csv", docs_path)

    votes = np.vstack(rows) if rows else np.empty((0, len(rollcall_ids)), dtype=np.int8)
    return VoteMatrix(
        voters=tuple(voter_meta[v] for v in voter_ids),
        rollcalls=tuple(doc_meta[r] for r in rollcall_ids),
        votes=votes,
        warning_count=warnings,
    )


def write_vote_table(matrix: VoteMatrix, votes_path, voters_path, docs_path) -> None:
    """Serialize back to the three-CSV format; inverse of parse_vote_table."""
    with open(voters_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["voter_id", "name", "country", "party", "group"])
        for v in matrix.voters:
            writer.writerow([v.id, v.name, v.country, v.party, v.group])
    with open(docs_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rollcall_id", "title", "date", "subdomains"])
        for d in matrix.rollcalls:
            writer.writerow([d.rollcall_id, d.title, d.date.isoformat(), ";".join(sorted(d.subdomains))])
    with open(votes_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["voter_id", *matrix.rollcall_ids])
        for i, v in enumerate(matrix.voters):
            writer.writerow([v.id, *(VoteValue(int(c)).name for c in matrix.votes[i])])


def _as_set(value):
    if value is None:
        return None
    if isinstance(value, str):
        return {value}
    return set(value)


def filter_matrix(matrix: VoteMatrix, country_filter=None, subdomain_filter=None,
                  date_range=None) -> VoteMatrix:
    """Sub-matrix of the voters/roll-calls passing every given filter.

    Order is preserved. Filters must reference existing countries and
    subdomains; an empty result raises EmptySelectionError rather than
    returning an empty matrix.
    """
    countries = _as_set(country_filter)
    subdomains = _as_set(subdomain_filter)

    if countries is not None:
        known = {v.country for v in matrix.voters}
        unknown = countries - known
        if unknown:
            raise EmptySelectionError(
                f"empty selection: country filter {sorted(unknown)} matches no voters")
    if subdomains is not None:
        known = set().union(*(d.subdomains for d in matrix.rollcalls)) if matrix.rollcalls else set()
        unknown = subdomains - known
        if unknown:
            raise EmptySelectionError(
                f"empty selection: subdomain filter {sorted(unknown)} matches no roll-calls")

    start = end = None
    if date_range is not None:
        start, end = date_range
        if isinstance(start, str):
            start = datetime.date.fromisoformat(start)
        if isinstance(end, str):
            end = datetime.date.fromisoformat(end)

    voter_idx = [i for i, v in enumerate(matrix.voters)
                 if countries is None or v.country in countries]
    doc_idx = []
    for j, d in enumerate(matrix.rollcalls):
        if subdomains is not None and not (d.subdomains & subdomains):
            continue
        if start is not None and d.date < start:
            continue
        if end is not None and d.date > end:
            continue
        doc_idx.append(j)

    if not voter_idx or not doc_idx:
        raise EmptySelectionError("empty selection: no voters or roll-calls pass the filters")

    return VoteMatrix(
        voters=tuple(matrix.voters[i] for i in voter_idx),
        rollcalls=tuple(matrix.rollcalls[j] for j in doc_idx),
        votes=matrix.votes[np.ix_(voter_idx, doc_idx)].copy(),
        warning_count=matrix.warning_count,
    )
