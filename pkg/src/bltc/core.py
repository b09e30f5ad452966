"""Commitments, quotient-tree openings, verification, and in-place updates.

The commitment to a length-2^n vector is a single G1 element. Opening all
positions builds a binary tree of quotient commitments: the node at level j
with prefix p commits the elementwise difference between the two half-vectors
under p. A position's proof is the n nodes on its root path. A single-entry
change shifts the commitment and exactly n tree nodes by known basis powers,
so provers maintain proofs across epochs without rebuilding.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from bltc import mle
from bltc.engine import (
    G1_BYTES,
    G1_GEN,
    G2_GEN,
    G1Element,
    G2Element,
    ORDER,
    multi_exp,
    multi_pair,
)
from bltc.mle import bit, height_of, prefix, suffix
from bltc.params import PublicParams, WatermarkedParams

CM_MAGIC = b"BLTCCM01"
PF_MAGIC = b"BLTCPF01"

_G2_GEN_INV = G2_GEN.inv()

Params = PublicParams | WatermarkedParams


class OpCounter:
    """Tally of group exponentiations and tree nodes written; for tests/bench."""

    def __init__(self):
        self.exponentiations = 0
        self.nodes_touched = 0

    def reset(self):
        self.exponentiations = 0
        self.nodes_touched = 0


@dataclass(frozen=True)
class Commitment:
    point: G1Element

    def to_bytes(self) -> bytes:
        return CM_MAGIC + self.point.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Commitment":
        if data[:8] != CM_MAGIC:
            raise ValueError(f"bad commitment magic {data[:8]!r}")
        if len(data) != 8 + G1_BYTES:
            raise ValueError("commitment file has wrong length")
        return cls(G1Element.from_bytes(data[8:]))


@dataclass(frozen=True)
class PathProof:
    """Root path for one position: elements ordered top-down (x_n, ..., x_1)."""

    n: int
    position: int
    elements: tuple[G1Element, ...]
    watermarked: bool = False

    def element(self, j: int) -> G1Element:
        """Node at level j (1 = leaf level, n = root)."""
        return self.elements[self.n - j]

    def to_bytes(self) -> bytes:
        head = PF_MAGIC + struct.pack("<IQB", self.n, self.position, int(self.watermarked))
        return head + b"".join(el.to_bytes() for el in self.elements)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PathProof":
        if data[:8] != PF_MAGIC:
            raise ValueError(f"bad proof magic {data[:8]!r}")
        n, position, flag = struct.unpack("<IQB", data[8:21])
        if len(data) != 21 + n * G1_BYTES:
            raise ValueError("proof file has wrong length")
        elements = tuple(
            G1Element.from_bytes(data[21 + k * G1_BYTES : 21 + (k + 1) * G1_BYTES])
            for k in range(n)
        )
        return cls(n=n, position=position, elements=elements, watermarked=bool(flag))


@dataclass(frozen=True)
class UpdateDelta:
    position: int
    delta: int


class ProofTree:
    """Quotient-commitment tree; levels[j-1][p] is the level-j node at prefix p.

    Single-writer contract: updates mutate nodes in place and must not overlap
    concurrent readers.
    """

    def __init__(self, n: int, levels: list[list[G1Element]], watermarked: bool):
        self.n = n
        self.levels = levels
        self.watermarked = watermarked

    def node(self, j: int, p: int) -> G1Element:
        return self.levels[j - 1][p]

    @property
    def node_count(self) -> int:
        return sum(len(level) for level in self.levels)

    def root(self) -> G1Element:
        return self.levels[self.n - 1][0]

    def snapshot(self) -> list[list[G1Element]]:
        return [list(level) for level in self.levels]


def commit(pp: Params, values: Sequence[int], counter: OpCounter | None = None) -> Commitment:
    """Bind a vector to one G1 element: the product of level-n basis powers."""
    n = height_of(values)
    if n != pp.n:
        raise ValueError(f"vector height {n} != parameter height {pp.n}")
    exps = [v % ORDER for v in values]
    if counter:
        counter.exponentiations += len(exps)
    return Commitment(multi_exp(pp.basis[n], exps))


def open_all(params: Params, values: Sequence[int], counter: OpCounter | None = None) -> ProofTree:
    """Build the full quotient tree for a vector.

    Each node is one multi-exponentiation over the basis one level down, so
    the whole tree costs n * 2^(n-1) exponentiations.
    """
    n = height_of(values)
    if n != params.n:
        raise ValueError(f"vector height {n} != parameter height {params.n}")
    levels: list[list[G1Element]] = [[None] * (1 << (n - j)) for j in range(1, n + 1)]

    def build(j: int, p: int, coeffs: list[int]) -> None:
        if j == 0:
            return
        half = 1 << (j - 1)
        lo, hi = coeffs[:half], coeffs[half:]
        quotient = [(b - a) % ORDER for a, b in zip(lo, hi)]
        levels[j - 1][p] = multi_exp(params.basis[j - 1], quotient)
        if counter:
            counter.exponentiations += half
        build(j - 1, p << 1, lo)
        build(j - 1, (p << 1) | 1, hi)

    build(n, 0, [v % ORDER for v in values])
    return ProofTree(n=n, levels=levels, watermarked=params.watermarked)


def open_path(tree: ProofTree, position: int) -> PathProof:
    """Extract the root path for one position (top-down order)."""
    if not 0 <= position < 1 << tree.n:
        raise IndexError(f"position {position} out of range for height {tree.n}")
    elements = tuple(tree.node(j, prefix(position, j)) for j in range(tree.n, 0, -1))
    return PathProof(n=tree.n, position=position, elements=elements,
                     watermarked=tree.watermarked)


def verification_key(pp: PublicParams, j: int, i_bit: int) -> G2Element:
    """Per-level key: vk_j shifted down by the position bit."""
    key = pp.vk[j - 1]
    return key * _G2_GEN_INV if i_bit else key


def verify_individual(pp: PublicParams, commitment: Commitment, position: int,
                      value: int, proof: PathProof, pvk: G2Element | None = None) -> bool:
    """Check one opened value against the commitment via the pairing product.

    For watermarked proofs pass the prover's public verification key; plain
    proofs verify with pvk = g2 (the default). The proof's own position label
    is not trusted; verification is against the position argument.
    """
    n = pp.n
    if len(proof.elements) != n:
        raise ValueError(f"proof has {len(proof.elements)} elements, expected {n}")
    if not 0 <= position < 1 << n:
        raise IndexError(f"position {position} out of range for height {n}")
    if pvk is None:
        pvk = G2_GEN
    lhs = commitment.point / G1_GEN ** (value % ORDER)
    g1s = [lhs.inv()]
    g2s = [pvk]
    for j in range(n, 0, -1):
        g1s.append(proof.element(j))
        g2s.append(verification_key(pp, j, bit(position, j)))
    return multi_pair(g1s, g2s).is_identity()


def update_commitment(pp: PublicParams, commitment: Commitment, delta: UpdateDelta,
                      counter: OpCounter | None = None) -> Commitment:
    """Shift the commitment for a single-entry change."""
    if not 0 <= delta.position < 1 << pp.n:
        raise IndexError(f"position {delta.position} out of range for height {pp.n}")
    if counter:
        counter.exponentiations += 1
    return Commitment(commitment.point * pp.basis[pp.n][delta.position] ** delta.delta)


def update_tree(params: Params, tree: ProofTree, delta: UpdateDelta,
                counter: OpCounter | None = None) -> None:
    """Shift the n tree nodes affected by a single-entry change, in place.

    At level j the touched node is the one whose prefix matches the changed
    position; its quotient gains the change on the high half (+) or low half
    (-) depending on the position's j-th bit.
    """
    n = tree.n
    if params.n != n:
        raise ValueError(f"parameter height {params.n} != tree height {n}")
    if params.watermarked != tree.watermarked:
        raise ValueError("parameter watermark state does not match the tree")
    i, xi = delta.position, delta.delta % ORDER
    if not 0 <= i < 1 << n:
        raise IndexError(f"position {i} out of range for height {n}")
    for j in range(n, 0, -1):
        exponent = xi if bit(i, j) else -xi
        shift = params.basis[j - 1][suffix(i, j - 1)] ** exponent
        p = prefix(i, j)
        tree.levels[j - 1][p] = tree.levels[j - 1][p] * shift
        if counter:
            counter.exponentiations += 1
            counter.nodes_touched += 1


def update(pp: PublicParams, commitment: Commitment, tree: ProofTree, delta: UpdateDelta,
           wm_params: WatermarkedParams | None = None,
           counter: OpCounter | None = None) -> Commitment:
    """Apply one change: returns the shifted commitment and mutates the tree.

    The commitment always shifts by plain-basis powers. Node shifts use
    `wm_params` when the tree is watermarked, `pp` otherwise.
    """
    node_params: Params
    if tree.watermarked:
        if wm_params is None:
            raise ValueError("watermarked tree requires wm_params")
        node_params = wm_params
    else:
        node_params = pp
    new_commitment = update_commitment(pp, commitment, delta, counter)
    update_tree(node_params, tree, delta, counter)
    return new_commitment


def batch_update(pp: PublicParams, commitment: Commitment, tree: ProofTree,
                 deltas: Sequence[UpdateDelta],
                 wm_params: WatermarkedParams | None = None,
                 counter: OpCounter | None = None) -> Commitment:
    """Apply changes sequentially; commutes across distinct positions."""
    for delta in deltas:
        commitment = update(pp, commitment, tree, delta, wm_params, counter)
    return commitment


def update_path(params: Params, proof: PathProof, delta: UpdateDelta) -> PathProof:
    """Refresh a standalone path proof after a change elsewhere in the vector.

    Only the levels where the proof's position and the changed position share
    a prefix are affected; for the proof's own position that is every level.
    """
    n = proof.n
    if params.n != n:
        raise ValueError(f"parameter height {params.n} != proof height {n}")
    if params.watermarked != proof.watermarked:
        raise ValueError("parameter watermark state does not match the proof")
    i_new, xi = delta.position, delta.delta % ORDER
    elements = list(proof.elements)
    for j in range(n, 0, -1):
        if prefix(proof.position, j) != prefix(i_new, j):
            break  # paths diverged; no lower level can coincide
        exponent = xi if bit(i_new, j) else -xi
        shift = params.basis[j - 1][suffix(i_new, j - 1)] ** exponent
        elements[n - j] = elements[n - j] * shift
    return PathProof(n=n, position=proof.position, elements=tuple(elements),
                     watermarked=proof.watermarked)


def write_commitment(commitment: Commitment, path) -> None:
    with open(path, "wb") as fh:
        fh.write(commitment.to_bytes())


def read_commitment(path) -> Commitment:
    with open(path, "rb") as fh:
        return Commitment.from_bytes(fh.read())


def write_proof(proof: PathProof, path) -> None:
    with open(path, "wb") as fh:
        fh.write(proof.to_bytes())


def read_proof(path) -> PathProof:
    with open(path, "rb") as fh:
        return PathProof.from_bytes(fh.read())
