"""Counter-based random streams.

A :class:`Stream` is a pure function of its key (master seed plus a tuple of
labels). Bit ``i`` of a stream is read from ``blake2b(key || i // 512)``, so any
bit can be computed on its own, in any order, by any worker.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

import numpy as np

_BLOCK_BITS = 512
_MASK64 = (1 << 64) - 1


class Stream:
    __slots__ = ("seed", "labels", "_prefix", "_blocks")

    def __init__(self, seed: int, labels: tuple = ()):
        self.seed = int(seed) & _MASK64
        self.labels = tuple(labels)
        key = repr((self.seed,) + self.labels).encode()
        h = hashlib.blake2b(digest_size=64, person=b"pixelgraph")
        h.update(len(key).to_bytes(4, "little") + key)
        self._prefix = h
        self._blocks: dict[int, int] = {}

    def child(self, *labels) -> "Stream":
        return Stream(self.seed, self.labels + labels)

    def _digest(self, block: int) -> bytes:
        h = self._prefix.copy()
        h.update(block.to_bytes(8, "little"))
        return h.digest()

    def block(self, block: int) -> int:
        """The 512-bit block ``block`` as an integer, bit i = stream bit 512*block + i."""
        word = self._blocks.get(block)
        if word is None:
            word = int.from_bytes(self._digest(block), "little")
            self._blocks[block] = word
        return word

    def bit(self, index: int) -> int:
        return (self.block(index // _BLOCK_BITS) >> (index % _BLOCK_BITS)) & 1

    def bits(self, count: int, start: int = 0) -> np.ndarray:
        """Bits ``start .. start+count-1`` as a uint8 array; agrees with :meth:`bit`."""
        if count <= 0:
            return np.zeros(0, dtype=np.uint8)
        first = start // _BLOCK_BITS
        last = (start + count - 1) // _BLOCK_BITS
        raw = b"".join(self._digest(b) for b in range(first, last + 1))
        allbits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        offset = start - first * _BLOCK_BITS
        return allbits[offset:offset + count]

    def word(self, index: int = 0) -> int:
        """The ``index``-th 64-bit word of the stream."""
        return (self.block(index // 8) >> (64 * (index % 8))) & _MASK64

    def dyadic(self, precision: int = 53) -> Fraction:
        """Exact dyadic rational uniform on the grid ``{k / 2^precision : 0 <= k < 2^precision}``."""
        if not 0 < precision <= 64:
            raise ValueError("precision must be in 1..64")
        return Fraction(self.word(0) >> (64 - precision), 1 << precision)

    def generator(self) -> np.random.Generator:
        """A numpy Philox generator keyed by this stream (for bulk float draws)."""
        key = int.from_bytes(self._digest(-1 & _MASK64)[:16], "little")
        return np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"Stream(seed={self.seed}, labels={self.labels!r})"
