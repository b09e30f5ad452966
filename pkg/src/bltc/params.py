"""Trusted setup: public parameters, watermark keys, and aggregation keys.

The setup samples a secret evaluation point, publishes group encodings of
every selection-basis polynomial at that point (one array per tree level),
plus the per-level verification keys, and then forgets the secret. A separate
secret exponent turns the basis into a worker-specific watermarked copy.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from random import Random

from bltc import mle
from bltc.engine import (
    G1_BYTES,
    G2_BYTES,
    G1Element,
    G2Element,
    G1_GEN,
    G2_GEN,
    ORDER,
    rand_nonzero_scalar,
    rand_scalar,
)

PP_MAGIC = b"BLTCPP01"
WM_MAGIC = b"BLTCWM01"
IK_MAGIC = b"BLTCIK01"

# 2^(MAX_HEIGHT+1) - 1 G1 points; 22 keeps a parameter set under ~1 GiB.
MAX_HEIGHT = 22


@dataclass
class PublicParams:
    """basis[j][s] = g1 raised to the level-j selection basis value at the trapdoor;
    vk[j-1] = g2 raised to the j-th trapdoor coordinate."""

    n: int
    basis: list[list[G1Element]]
    vk: list[G2Element]
    g1: G1Element = field(default=G1_GEN, repr=False)
    g2: G2Element = field(default=G2_GEN, repr=False)
    trapdoor: tuple[int, ...] | None = field(default=None, repr=False)

    watermarked = False

    def basis_element(self, j: int, s: int) -> G1Element:
        return self.basis[j][s]


@dataclass
class WatermarkedParams:
    """Public parameters with every basis element raised to the watermark secret.

    Verification keys are carried through unchanged so the file layout matches
    the plain parameter file.
    """

    n: int
    basis: list[list[G1Element]]
    vk: list[G2Element]
    g1: G1Element = field(default=G1_GEN, repr=False)
    g2: G2Element = field(default=G2_GEN, repr=False)

    watermarked = True

    def basis_element(self, j: int, s: int) -> G1Element:
        return self.basis[j][s]


@dataclass(frozen=True)
class WatermarkKeyPair:
    wmk: int
    pvk: G2Element

    @classmethod
    def from_secret(cls, wmk: int, strict: bool = True) -> "WatermarkKeyPair":
        wmk %= ORDER
        if wmk == 0:
            raise ValueError("watermark key must be nonzero")
        if strict and wmk == 1:
            raise ValueError("degenerate watermark key (exponent 1)")
        return cls(wmk=wmk, pvk=G2_GEN**wmk)


@dataclass
class IpaCommitKey:
    """Structured commitment keys for the aggregation argument.

    ck_g2 commits a G1 vector, ck_g1 a G2 vector. Generated from trapdoors
    independent of the parameter setup and discarded after generation.
    """

    m: int
    ck_g2: list[G2Element]
    ck_g1: list[G1Element]


def _selection_basis_values(a_low: list[int]) -> list[list[int]]:
    """All selection-basis values at the trapdoor, levels 0..n.

    Level j extends level j-1 by the factor for the new top bit, so the whole
    table costs one field multiply per entry.
    """
    levels = [[1]]
    for j, a_j in enumerate(a_low, start=1):
        prev = levels[-1]
        lo = [(1 - a_j) * y % ORDER for y in prev]
        hi = [a_j * y % ORDER for y in prev]
        levels.append(lo + hi)
    return levels


def gen(n: int, *, seed: int | None = None, keep_trapdoor: bool = False,
        max_height: int = MAX_HEIGHT) -> PublicParams:
    """Run the trusted setup for vectors of length 2^n.

    A seed makes the draw deterministic (test/CLI reproducibility only; a
    production ceremony must not pass one). `keep_trapdoor` retains the secret
    point on the returned object for oracle tests; it is never serialized.
    """
    if n < 0:
        raise ValueError("height must be non-negative")
    if n > max_height:
        raise ValueError(f"height {n} exceeds memory budget (max {max_height})")
    rng = Random(seed) if seed is not None else None
    a_low = [rand_scalar(rng) for _ in range(n)]  # a_low[j-1] = a_j
    values = _selection_basis_values(a_low)
    basis = [[G1_GEN**y for y in level] for level in values]
    vk = [G2_GEN**a_j for a_j in a_low]
    trapdoor = tuple(reversed(a_low)) if keep_trapdoor else None
    return PublicParams(n=n, basis=basis, vk=vk, trapdoor=trapdoor)


def mark(*, seed: int | None = None, strict: bool = True) -> WatermarkKeyPair:
    """Sample a watermark secret and its public verification key."""
    rng = Random(seed) if seed is not None else None
    while True:
        theta = rand_nonzero_scalar(rng)
        if not (strict and theta == 1):
            return WatermarkKeyPair(wmk=theta, pvk=G2_GEN**theta)


def mark_pp_gen(pp: PublicParams, wmk: int) -> WatermarkedParams:
    """Raise every basis element to the watermark secret."""
    if wmk % ORDER == 0:
        raise ValueError("watermark key must be nonzero")
    basis = [[point**wmk for point in level] for level in pp.basis]
    return WatermarkedParams(n=pp.n, basis=basis, vk=list(pp.vk), g1=pp.g1, g2=pp.g2)


def ipa_keygen(m: int, *, seed: int | None = None) -> IpaCommitKey:
    """Generate power-structured commitment keys of width m (a power of two)."""
    if m < 1 or m & (m - 1):
        raise ValueError(f"key width {m} is not a power of two")
    rng = Random(seed) if seed is not None else None
    beta = rand_nonzero_scalar(rng)
    gamma = rand_nonzero_scalar(rng)
    ck_g2, ck_g1 = [], []
    pb = pg = 1
    for _ in range(m):
        pb = pb * beta % ORDER
        pg = pg * gamma % ORDER
        ck_g2.append(G2_GEN**pb)
        ck_g1.append(G1_GEN**pg)
    return IpaCommitKey(m=m, ck_g2=ck_g2, ck_g1=ck_g1)


# ---------------------------------------------------------------------------
# On-disk formats


def params_to_bytes(pp: PublicParams | WatermarkedParams) -> bytes:
    out = [WM_MAGIC if pp.watermarked else PP_MAGIC, struct.pack("<I", pp.n)]
    for level in pp.basis:
        out.append(struct.pack("<I", len(level)))
        out.extend(point.to_bytes() for point in level)
    out.extend(point.to_bytes() for point in pp.vk)
    return b"".join(out)


def params_from_bytes(data: bytes) -> PublicParams | WatermarkedParams:
    magic, data = data[:8], data[8:]
    if magic not in (PP_MAGIC, WM_MAGIC):
        raise ValueError(f"bad parameter file magic {magic!r}")
    (n,) = struct.unpack("<I", data[:4])
    pos = 4
    basis = []
    for j in range(n + 1):
        (count,) = struct.unpack("<I", data[pos : pos + 4])
        pos += 4
        if count != 1 << j:
            raise ValueError(f"level {j} has {count} points, expected {1 << j}")
        level = []
        for _ in range(count):
            level.append(G1Element.from_bytes(data[pos : pos + G1_BYTES]))
            pos += G1_BYTES
        basis.append(level)
    vk = []
    for _ in range(n):
        vk.append(G2Element.from_bytes(data[pos : pos + G2_BYTES]))
        pos += G2_BYTES
    if pos != len(data):
        raise ValueError("trailing bytes in parameter file")
    cls = WatermarkedParams if magic == WM_MAGIC else PublicParams
    return cls(n=n, basis=basis, vk=vk)


def write_params(pp: PublicParams | WatermarkedParams, path) -> None:
    with open(path, "wb") as fh:
        fh.write(params_to_bytes(pp))


def read_params(path) -> PublicParams | WatermarkedParams:
    with open(path, "rb") as fh:
        return params_from_bytes(fh.read())


def ipa_key_to_bytes(ck: IpaCommitKey) -> bytes:
    out = [IK_MAGIC, struct.pack("<I", ck.m)]
    out.extend(point.to_bytes() for point in ck.ck_g2)
    out.extend(point.to_bytes() for point in ck.ck_g1)
    return b"".join(out)


def ipa_key_from_bytes(data: bytes) -> IpaCommitKey:
    if data[:8] != IK_MAGIC:
        raise ValueError(f"bad aggregation key magic {data[:8]!r}")
    (m,) = struct.unpack("<I", data[8:12])
    pos = 12
    ck_g2 = []
    for _ in range(m):
        ck_g2.append(G2Element.from_bytes(data[pos : pos + G2_BYTES]))
        pos += G2_BYTES
    ck_g1 = []
    for _ in range(m):
        ck_g1.append(G1Element.from_bytes(data[pos : pos + G1_BYTES]))
        pos += G1_BYTES
    if pos != len(data):
        raise ValueError("trailing bytes in aggregation key file")
    return IpaCommitKey(m=m, ck_g2=ck_g2, ck_g1=ck_g1)


def write_ipa_key(ck: IpaCommitKey, path) -> None:
    with open(path, "wb") as fh:
        fh.write(ipa_key_to_bytes(ck))


def read_ipa_key(path) -> IpaCommitKey:
    with open(path, "rb") as fh:
        return ipa_key_from_bytes(fh.read())
