"""Multilinear extension math over the scalar field.

A length-2^n vector is read as a function on the Boolean n-cube and extended
multilinearly. Bit order: index i decomposes as i = sum_j i_j * 2^(j-1), so
i_1 is the least significant bit. Evaluation points and trapdoors are passed
in the order (z_n, ..., z_1), matching the index decomposition.

Vectors of field elements double as polynomials in evaluation (Lagrange)
form; nothing here ever converts to the monomial basis.
"""

from __future__ import annotations

from typing import Sequence

from bltc.engine import ORDER


def bit(i: int, j: int) -> int:
    """j-th bit of i, 1-indexed from the LSB."""
    return (i >> (j - 1)) & 1


def prefix(i: int, j: int) -> int:
    """High bits (i_n, ..., i_{j+1}) of an n-bit index, as an integer."""
    return i >> j


def suffix(i: int, j: int) -> int:
    """Low bits (i_j, ..., i_1) of an index, as an integer."""
    return i & ((1 << j) - 1)


def height_of(values: Sequence[int]) -> int:
    """Tree height n for a vector of length 2^n."""
    length = len(values)
    if length == 0 or length & (length - 1):
        raise ValueError(f"vector length {length} is not a power of two")
    return length.bit_length() - 1


def selection(b: int, a: int) -> int:
    """Per-bit selection factor: a if the bit is set, 1 - a otherwise."""
    if b == 1:
        return a % ORDER
    if b == 0:
        return (1 - a) % ORDER
    raise ValueError(f"bit must be 0 or 1, got {b}")


def lagrange_basis(k: int, a_suffix: Sequence[int]) -> int:
    """Product of selection factors for the j low bits of k at (a_j, ..., a_1).

    The empty suffix (j = 0) gives 1. At a Boolean point the basis is the
    Kronecker delta.
    """
    j = len(a_suffix)
    if k >> j:
        raise ValueError(f"index {k} does not fit in {j} bits")
    out = 1
    for m in range(1, j + 1):
        out = out * selection(bit(k, m), a_suffix[j - m]) % ORDER
    return out


def mle_eval(values: Sequence[int], point: Sequence[int]) -> int:
    """Evaluate the multilinear extension of `values` at (z_n, ..., z_1).

    Streaming fold: collapse one variable per pass, z_1 first. At the Boolean
    encoding of i this returns values[i] exactly.
    """
    n = height_of(values)
    if len(point) != n:
        raise ValueError(f"point has {len(point)} coordinates, expected {n}")
    layer = [v % ORDER for v in values]
    for m in range(1, n + 1):
        z = point[n - m] % ORDER
        layer = [
            (layer[2 * t] * (1 - z) + layer[2 * t + 1] * z) % ORDER
            for t in range(len(layer) // 2)
        ]
    return layer[0]


def split(values: Sequence[int]) -> tuple[list[int], list[int], list[int]]:
    """Divide a j-variable polynomial by (a_j - t), t Boolean.

    Returns (f0, f1, quotient) in evaluation form: f0 is the half with the
    leading bit clear, f1 the half with it set, and the quotient is f1 - f0
    elementwise, so that f = (f1 - f0)*(a_j - t) + f_t holds for t in {0, 1}.
    """
    n = height_of(values)
    if n == 0:
        raise ValueError("cannot split a constant")
    half = len(values) // 2
    f0 = [v % ORDER for v in values[:half]]
    f1 = [v % ORDER for v in values[half:]]
    quotient = [(hi - lo) % ORDER for lo, hi in zip(f0, f1)]
    return f0, f1, quotient
