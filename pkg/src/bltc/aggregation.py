"""Aggregation of many path proofs into one short argument.

The flattened proof vector R (all path elements of every opened position) is
committed by a pairing product against structured G2 keys. Per-position
challenges weight the verification keys so one target value captures every
position's pairing equation at once; a halving argument then binds R to both
the key commitment and that target in log rounds. The verifier re-folds the
public key vectors itself, keeping the proof logarithmic and verification
linear in the number of opened elements.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Sequence

from bltc.core import Commitment, PathProof
from bltc.engine import (
    G1_BYTES,
    GT_BYTES,
    G1_GEN,
    G2_GEN,
    G1_IDENTITY,
    G2_IDENTITY,
    G1Element,
    G2Element,
    GTElement,
    ORDER,
    hash_to_scalar,
    multi_pair,
    pair,
    scalar_to_bytes,
)
from bltc.mle import bit
from bltc.params import IpaCommitKey, PublicParams

AG_MAGIC = b"BLTCAG01"

V_TAG = b"BLTC/AGG/v"
ROUND_TAG = b"BLTC/AGG/x"
TRANSCRIPT_TAG = b"BLTC/AGG/transcript"


@dataclass(frozen=True)
class AggregationInstance:
    """What an aggregated proof speaks about: one commitment, the opened
    positions with their claimed values, and a verification key per position."""

    commitment: Commitment
    positions: tuple[int, ...]
    values: tuple[int, ...]
    pvks: tuple[G2Element, ...]

    def __post_init__(self):
        if not self.positions:
            raise ValueError("at least one position required")
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("positions must be distinct")
        if not (len(self.positions) == len(self.values) == len(self.pvks)):
            raise ValueError("positions, values and pvks must have equal lengths")

    @classmethod
    def for_worker(cls, commitment: Commitment, positions: Sequence[int],
                   values: Sequence[int], pvk: G2Element | None = None
                   ) -> "AggregationInstance":
        """Single-worker convenience: one pvk for every position (g2 if None)."""
        if pvk is None:
            pvk = G2_GEN
        return cls(commitment=commitment, positions=tuple(positions),
                   values=tuple(values), pvks=(pvk,) * len(positions))

    def digest(self) -> bytes:
        h = hashlib.sha512()
        h.update(self.commitment.point.to_bytes())
        h.update(struct.pack("<I", len(self.positions)))
        for i, w, pvk in zip(self.positions, self.values, self.pvks):
            h.update(struct.pack("<Q", i))
            h.update(scalar_to_bytes(w))
            h.update(pvk.to_bytes())
        return h.digest()


@dataclass(frozen=True)
class AggregatedProof:
    """Pairing commitment to the proof vector, the claimed pairing product,
    the halving-round cross terms, and the fully folded G1 element."""

    m_padded: int
    b_commit: GTElement
    z_value: GTElement
    rounds: tuple[tuple[GTElement, GTElement, GTElement, GTElement], ...]
    final_r: G1Element

    def group_element_count(self) -> int:
        return 2 + 4 * len(self.rounds) + 1

    def to_bytes(self) -> bytes:
        out = [AG_MAGIC, struct.pack("<I", self.m_padded),
               self.b_commit.to_bytes(), self.z_value.to_bytes(),
               struct.pack("<B", len(self.rounds))]
        for rnd in self.rounds:
            out.extend(el.to_bytes() for el in rnd)
        out.append(self.final_r.to_bytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "AggregatedProof":
        if data[:8] != AG_MAGIC:
            raise ValueError(f"bad aggregated proof magic {data[:8]!r}")
        (m_padded,) = struct.unpack("<I", data[8:12])
        pos = 12
        b_commit = GTElement.from_bytes(data[pos : pos + GT_BYTES])
        pos += GT_BYTES
        z_value = GTElement.from_bytes(data[pos : pos + GT_BYTES])
        pos += GT_BYTES
        (n_rounds,) = struct.unpack("<B", data[pos : pos + 1])
        pos += 1
        rounds = []
        for _ in range(n_rounds):
            quad = []
            for _ in range(4):
                quad.append(GTElement.from_bytes(data[pos : pos + GT_BYTES]))
                pos += GT_BYTES
            rounds.append(tuple(quad))
        final_r = G1Element.from_bytes(data[pos : pos + G1_BYTES])
        pos += G1_BYTES
        if pos != len(data):
            raise ValueError("trailing bytes in aggregated proof")
        return cls(m_padded=m_padded, b_commit=b_commit, z_value=z_value,
                   rounds=tuple(rounds), final_r=final_r)


class _Transcript:
    """Chained-digest Fiat-Shamir transcript with domain-tagged challenges."""

    def __init__(self):
        self._state = hashlib.sha512(TRANSCRIPT_TAG).digest()

    def absorb(self, *chunks: bytes) -> None:
        h = hashlib.sha512(self._state)
        for chunk in chunks:
            h.update(chunk)
        self._state = h.digest()

    def challenge(self) -> int:
        counter = 0
        while True:
            x = hash_to_scalar(ROUND_TAG, self._state + struct.pack("<I", counter))
            if x != 0:
                self.absorb(b"chal", scalar_to_bytes(x))
                return x
            counter += 1


def _next_power_of_two(x: int) -> int:
    return 1 if x <= 1 else 1 << (x - 1).bit_length()


def build_keys(pp: PublicParams, positions: Sequence[int]) -> list[G2Element]:
    """Per-node verification keys for the given positions, flattened in the
    same top-down order as the path elements."""
    keys = []
    for i in positions:
        if not 0 <= i < 1 << pp.n:
            raise IndexError(f"position {i} out of range for height {pp.n}")
        for j in range(pp.n, 0, -1):
            key = pp.vk[j - 1]
            keys.append(key / G2_GEN if bit(i, j) else key)
    return keys


def _keys_digest(keys: Sequence[G2Element]) -> bytes:
    h = hashlib.sha512()
    for key in keys:
        h.update(key.to_bytes())
    return h.digest()


def _block_challenges(b_commit: GTElement, keys_digest: bytes, count: int) -> list[int]:
    payload = b_commit.to_bytes() + keys_digest
    return [hash_to_scalar(V_TAG, payload + struct.pack("<I", idx + 1))
            for idx in range(count)]


def _weighted_keys(keys: list[G2Element], challenges: list[int], n: int,
                   m_padded: int) -> list[G2Element]:
    """Raise each position's key block to its challenge; identity padding."""
    weighted = [key ** challenges[b // n] for b, key in enumerate(keys)]
    weighted.extend([G2_IDENTITY] * (m_padded - len(weighted)))
    return weighted


def _start_transcript(instance: AggregationInstance, m_padded: int,
                      b_commit: GTElement, keys_digest: bytes,
                      z_value: GTElement) -> _Transcript:
    tr = _Transcript()
    tr.absorb(instance.digest(), struct.pack("<I", m_padded),
              b_commit.to_bytes(), keys_digest, z_value.to_bytes())
    return tr


def aggregate(pp: PublicParams, ck: IpaCommitKey, instance: AggregationInstance,
              proofs: Sequence[PathProof]) -> AggregatedProof:
    """Fold the given path proofs into one short argument.

    Deterministic: all challenges come from the transcript. Proofs must match
    the instance's positions in order; an invalid input still aggregates but
    the result will not verify.
    """
    n = pp.n
    if len(proofs) != len(instance.positions):
        raise ValueError("one proof required per position")
    for proof, position in zip(proofs, instance.positions):
        if proof.position != position:
            raise ValueError(f"proof for position {proof.position} does not "
                             f"match instance position {position}")
        if len(proof.elements) != n:
            raise ValueError("proof length does not match parameter height")

    m_real = len(instance.positions) * n
    m_padded = _next_power_of_two(m_real)
    if m_padded > ck.m:
        raise ValueError(f"aggregation width {m_padded} exceeds key capacity {ck.m}")

    r_vec = [el for proof in proofs for el in proof.elements]
    r_vec.extend([G1_IDENTITY] * (m_padded - m_real))
    ck_vec = list(ck.ck_g2[:m_padded])

    b_commit = multi_pair(r_vec, ck_vec)
    keys = build_keys(pp, instance.positions)
    keys_digest = _keys_digest(keys)
    challenges = _block_challenges(b_commit, keys_digest, len(instance.positions))
    t_vec = _weighted_keys(keys, challenges, n, m_padded)

    z_value = multi_pair(r_vec, t_vec)
    tr = _start_transcript(instance, m_padded, b_commit, keys_digest, z_value)

    rounds = []
    while len(r_vec) > 1:
        half = len(r_vec) // 2
        r_lo, r_hi = r_vec[:half], r_vec[half:]
        t_lo, t_hi = t_vec[:half], t_vec[half:]
        ck_lo, ck_hi = ck_vec[:half], ck_vec[half:]
        z_l = multi_pair(r_hi, t_lo)
        z_r = multi_pair(r_lo, t_hi)
        b_l = multi_pair(r_hi, ck_lo)
        b_r = multi_pair(r_lo, ck_hi)
        rounds.append((z_l, z_r, b_l, b_r))
        tr.absorb(z_l.to_bytes(), z_r.to_bytes(), b_l.to_bytes(), b_r.to_bytes())
        x = tr.challenge()
        x_inv = pow(x, -1, ORDER)
        r_vec = [lo * hi**x for lo, hi in zip(r_lo, r_hi)]
        t_vec = [lo * hi**x_inv for lo, hi in zip(t_lo, t_hi)]
        ck_vec = [lo * hi**x_inv for lo, hi in zip(ck_lo, ck_hi)]

    return AggregatedProof(m_padded=m_padded, b_commit=b_commit, z_value=z_value,
                           rounds=tuple(rounds), final_r=r_vec[0])


def verify_aggregated(pp: PublicParams, ck: IpaCommitKey,
                      instance: AggregationInstance, proof: AggregatedProof) -> bool:
    """Check an aggregated proof against the instance.

    Recomputes the challenge-weighted target from the commitment and claimed
    values, replays the halving rounds folding the public key vectors, and
    accepts only if the folded relations close on the final element.
    """
    n = pp.n
    u = len(instance.positions)
    m_real = u * n
    if proof.m_padded != _next_power_of_two(m_real):
        return False
    if len(proof.rounds) != proof.m_padded.bit_length() - 1:
        return False
    if proof.m_padded > ck.m:
        raise ValueError(f"aggregation width {proof.m_padded} exceeds key capacity {ck.m}")

    keys = build_keys(pp, instance.positions)
    keys_digest = _keys_digest(keys)
    challenges = _block_challenges(proof.b_commit, keys_digest, u)

    # Challenge-weighted product of every position's pairing-equation left side.
    lhs = [
        ((instance.commitment.point / G1_GEN ** (w % ORDER)) ** v)
        for w, v in zip(instance.values, challenges)
    ]
    z_agg = multi_pair(lhs, list(instance.pvks))
    if proof.z_value != z_agg:
        return False

    t_vec = _weighted_keys(keys, challenges, n, proof.m_padded)
    ck_vec = list(ck.ck_g2[:proof.m_padded])
    tr = _start_transcript(instance, proof.m_padded, proof.b_commit, keys_digest,
                           proof.z_value)

    z_fold, b_fold = z_agg, proof.b_commit
    for z_l, z_r, b_l, b_r in proof.rounds:
        tr.absorb(z_l.to_bytes(), z_r.to_bytes(), b_l.to_bytes(), b_r.to_bytes())
        x = tr.challenge()
        x_inv = pow(x, -1, ORDER)
        z_fold = z_l**x * z_fold * z_r**x_inv
        b_fold = b_l**x * b_fold * b_r**x_inv
        half = len(t_vec) // 2
        t_vec = [lo * hi**x_inv for lo, hi in zip(t_vec[:half], t_vec[half:])]
        ck_vec = [lo * hi**x_inv for lo, hi in zip(ck_vec[:half], ck_vec[half:])]

    if pair(proof.final_r, ck_vec[0]) != b_fold:
        return False
    return pair(proof.final_r, t_vec[0]) == z_fold


def write_aggregated_proof(proof: AggregatedProof, path) -> None:
    with open(path, "wb") as fh:
        fh.write(proof.to_bytes())


def read_aggregated_proof(path) -> AggregatedProof:
    with open(path, "rb") as fh:
        return AggregatedProof.from_bytes(fh.read())
