"""Enumeration of F_q^N and P^{N-1}(F_q) in fixed, chunked order.

Affine points are listed in odometer order, first coordinate fastest.
Projective points use the representative whose first nonzero coordinate is
1, grouped by the position of that leading 1 (position 0 first); inside a
group the free trailing coordinates run in odometer order.

Work is split into chunks that fix the slowest coordinates, so a chunk is a
slab of the outermost coordinate range. Chunks are reduced by integer
summation, which makes results independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ff import FieldSpec, check_ceiling

CHUNK = 1 << 16


def pi(i: int, q: int) -> int:
    """#P^i(F_q) = q^i + ... + q + 1, with pi(-1) = 0."""
    if i < -1:
        raise ValueError("pi is defined for i >= -1")
    return sum(q**j for j in range(i + 1))


@dataclass(frozen=True)
class Chunk:
    lead: int | None  # None for affine; else position of the leading 1
    lo: int
    hi: int

    def __len__(self):
        return self.hi - self.lo


def _slabs(total: int, q: int, chunk: int):
    step = 1
    while step * q <= chunk and step * q <= total:
        step *= q
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def affine_chunks(q: int, nvars: int, chunk: int = CHUNK) -> list[Chunk]:
    return [Chunk(None, lo, hi) for lo, hi in _slabs(q**nvars, q, chunk)]


def projective_chunks(q: int, nvars: int, chunk: int = CHUNK) -> list[Chunk]:
    out = []
    for lead in range(nvars):
        out.extend(Chunk(lead, lo, hi) for lo, hi in _slabs(q ** (nvars - 1 - lead), q, chunk))
    return out


def chunks_for(q: int, nvars: int, projective: bool, ceiling: int | None = None, chunk: int = CHUNK):
    size = pi(nvars - 1, q) if projective else q**nvars
    check_ceiling(size, f"{'P^%d' % (nvars - 1) if projective else 'A^%d' % nvars}(F_{q})", ceiling)
    return projective_chunks(q, nvars, chunk) if projective else affine_chunks(q, nvars, chunk)


def materialize(c: Chunk, q: int, nvars: int) -> list[np.ndarray]:
    """Coordinate columns for every point of the chunk."""
    idx = np.arange(c.lo, c.hi, dtype=np.int64)
    if c.lead is None:
        return [(idx // q**j) % q for j in range(nvars)]
    cols = []
    for j in range(nvars):
        if j < c.lead:
            cols.append(np.zeros_like(idx))
        elif j == c.lead:
            cols.append(np.ones_like(idx))
        else:
            cols.append((idx // q ** (j - c.lead - 1)) % q)
    return cols


def iter_points(q: int, nvars: int, projective: bool):
    """Plain-Python enumeration in the same order as the chunks (for small cases and tests)."""
    for c in (projective_chunks if projective else affine_chunks)(q, nvars):
        cols = materialize(c, q, nvars)
        for row in zip(*(col.tolist() for col in cols)):
            yield row


def point_at(field: FieldSpec, nvars: int, projective: bool, index: int) -> tuple[int, ...]:
    """The index-th point in enumeration order."""
    q = field.q
    if not projective:
        return tuple((index // q**j) % q for j in range(nvars))
    for lead in range(nvars):
        size = q ** (nvars - 1 - lead)
        if index < size:
            return tuple([0] * lead + [1] + [(index // q**j) % q for j in range(nvars - 1 - lead)])
        index -= size
    raise IndexError("point index out of range")


def run_chunks(fn, chunks, workers: int = 1):
    """Map ``fn`` over chunks, in order, on ``workers`` threads."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def normalize(field: FieldSpec, point) -> tuple[int, ...]:
    """Canonical projective representative (first nonzero coordinate 1)."""
    lead = next((x for x in point if x), None)
    if lead is None:
        raise ValueError("the zero vector is not a projective point")
    inv = field.inv(lead)
    return tuple(field.mul(inv, x) for x in point)
