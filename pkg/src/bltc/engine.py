"""Bilinear pairing engine over BLS12-381.

Every other module does its group arithmetic through this interface, so the
curve backend can be swapped by rebinding the names below. Group elements are
immutable handles in multiplicative notation: ``a * b`` is the group
operation, ``a ** k`` exponentiation by a Python int (reduced mod ``ORDER``),
``a / b`` division. Scalars are plain Python ints kept canonical in
``[0, ORDER)`` by the callers.
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass
from random import Random
from typing import Sequence

from bltc import _curve

G1Element = _curve.G1
G2Element = _curve.G2
GTElement = _curve.GT

ORDER: int = _curve.curve_order()

G1_GEN: G1Element = G1Element.generator()
G2_GEN: G2Element = G2Element.generator()
G1_IDENTITY: G1Element = G1Element.identity()
G2_IDENTITY: G2Element = G2Element.identity()
GT_IDENTITY: GTElement = GTElement.identity()

# Compressed encoding widths (bytes).
G1_BYTES = 48
G2_BYTES = 96
GT_BYTES = 576
SCALAR_BYTES = 32


@dataclass(frozen=True)
class EngineConfig:
    curve_id: str
    order: int
    g1: G1Element
    g2: G2Element


CONFIG = EngineConfig(curve_id="BLS12-381", order=ORDER, g1=G1_GEN, g2=G2_GEN)

pair = _curve.pair
multi_pair = _curve.multi_pair


def multi_exp(bases: Sequence[G1Element], exponents: Sequence[int]) -> G1Element:
    """Product of bases[i] ** exponents[i]; identity for empty inputs."""
    if len(bases) != len(exponents):
        raise ValueError(f"multi_exp: {len(bases)} bases vs {len(exponents)} exponents")
    if not bases:
        return G1_IDENTITY
    return G1Element.msm(list(bases), list(exponents))


def hash_to_scalar(tag: bytes, payload: bytes) -> int:
    """Map (tag, payload) to a scalar via a 512-bit hash reduced mod ORDER.

    The wide digest keeps the modular bias below 2^-250. Distinct tags give
    independent functions; the tag is length-framed so boundaries cannot melt
    into the payload.
    """
    if not tag:
        raise ValueError("hash_to_scalar: empty domain tag")
    digest = hashlib.sha512(struct.pack("<I", len(tag)) + tag + payload).digest()
    return int.from_bytes(digest, "big") % ORDER


def hash_to_g1(tag: bytes, payload: bytes) -> G1Element:
    """Map (tag, payload) to a G1 point with no known discrete log."""
    if not tag:
        raise ValueError("hash_to_g1: empty domain tag")
    return _curve.hash_to_g1_point(tag, payload)


def rand_scalar(rng: Random | None = None) -> int:
    """Uniform scalar in [0, ORDER); cryptographic randomness when rng is None."""
    if rng is None:
        return secrets.randbelow(ORDER)
    return rng.randrange(ORDER)


def rand_nonzero_scalar(rng: Random | None = None) -> int:
    while True:
        x = rand_scalar(rng)
        if x != 0:
            return x


def scalar_to_bytes(x: int) -> bytes:
    return (x % ORDER).to_bytes(SCALAR_BYTES, "big")


def scalar_from_bytes(data: bytes) -> int:
    if len(data) != SCALAR_BYTES:
        raise ValueError(f"scalar encoding must be {SCALAR_BYTES} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= ORDER:
        raise ValueError("scalar encoding out of range")
    return value
