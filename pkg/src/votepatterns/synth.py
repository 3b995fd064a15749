"""Synthetic roll-call generator with known ground truth.

Each roll-call draws one of the planted voter partitions (by mixture
weight), assigns a vote value per faction (FOR / AGAINST / ABSTAIN,
cycling), flips each vote to a different value with the noise rate, and
blanks it to ABSENT with the absence rate. The emitted ground truth maps
every roll-call to its planted pattern index.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from ._rng import rng_for
from .cc import Partition
from .ingest import DocumentMeta, VoteMatrix, Voter

_STANCE_CYCLE = (0, 1, 2)  # FOR, AGAINST, ABSTAIN codes


@dataclass(frozen=True)
class SyntheticSpec:
    n_voters: int
    n_rollcalls: int
    planted: tuple[tuple[tuple[int, ...], ...], ...]  # partitions as blocks of voter indices
    weights: tuple[float, ...] = ()
    noise_rate: float = 0.0
    absence_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_voters < 1 or self.n_rollcalls < 1:
            raise ValueError("need at least one voter and one roll-call")
        if not self.planted:
            raise ValueError("need at least one planted pattern")
        for blocks in self.planted:
            members = sorted(m for b in blocks for m in b)
            if members != list(range(self.n_voters)):
                raise ValueError("each planted pattern must partition range(n_voters)")
        if self.weights and len(self.weights) != len(self.planted):
            raise ValueError("weights must match the planted patterns")
        if not 0.0 <= self.noise_rate < 1.0 or not 0.0 <= self.absence_rate < 1.0:
            raise ValueError("rates must lie in [0, 1)")


@dataclass(frozen=True)
class GroundTruth:
    pattern_of_rollcall: dict[str, int]
    planted_partitions: tuple[Partition, ...]


def default_planted(n_voters: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Three stock shapes: unanimity, an even split, and a three-way split."""
    all_v = tuple(range(n_voters))
    half = n_voters // 2
    third = n_voters // 3
    return (
        (all_v,),
        (all_v[:half], all_v[half:]),
        (all_v[:third], all_v[third:2 * third], all_v[2 * third:]),
    )


def voter_id(i: int) -> str:
    return f"v{i:04d}"


def generate_synthetic(spec: SyntheticSpec) -> tuple[VoteMatrix, GroundTruth]:
    rng = rng_for(spec.seed, "synthetic-generator")
    n, p = spec.n_voters, spec.n_rollcalls
    weights = np.array(spec.weights if spec.weights else [1.0] * len(spec.planted), dtype=np.float64)
    weights = weights / weights.sum()

    stance = np.empty((len(spec.planted), n), dtype=np.int8)
    for pi, blocks in enumerate(spec.planted):
        for b, block in enumerate(blocks):
            for m in block:
                stance[pi, m] = _STANCE_CYCLE[b % len(_STANCE_CYCLE)]

    votes = np.empty((n, p), dtype=np.int8)
    chosen = rng.choice(len(spec.planted), size=p, p=weights)
    for j in range(p):
        col = stance[chosen[j]].copy()
        if spec.noise_rate > 0.0:
            flips = rng.random(n) < spec.noise_rate
            offsets = rng.integers(1, 3, size=n).astype(np.int8)  # move to one of the other two values
            col = np.where(flips, (col + offsets) % 3, col)
        if spec.absence_rate > 0.0:
            col = np.where(rng.random(n) < spec.absence_rate, np.int8(3), col)
        votes[:, j] = col

    groups = max(1, min(4, n))
    block = max(1, n // groups)
    voters = tuple(
        Voter(voter_id(i), f"Voter {i}", "ZZ", "Party", f"G{min(i // block, groups - 1)}")
        for i in range(n)
    )
    base = datetime.date(2012, 7, 1)
    rollcalls = tuple(
        DocumentMeta(f"rc{j:04d}", f"Synthetic roll-call {j}", base + datetime.timedelta(days=j),
                     frozenset({"SYN"}))
        for j in range(p)
    )
    matrix = VoteMatrix(voters, rollcalls, votes)
    truth = GroundTruth(
        pattern_of_rollcall={f"rc{j:04d}": int(chosen[j]) for j in range(p)},
        planted_partitions=tuple(
            Partition.from_blocks([[voter_id(m) for m in b] for b in blocks])
            for blocks in spec.planted
        ),
    )
    return matrix, truth
