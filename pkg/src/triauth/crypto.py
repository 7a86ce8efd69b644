"""Byte-level primitives shared by every protocol role.

All digests, nonces, and XOR masks are 32-octet SHA-256 blocks.  Multi-part
hash inputs go through an injective length-prefixed concatenation, so two
different part lists can never produce the same hash input.
"""

import hashlib
import struct

DIGEST_LEN = 32
HASH_NAME = "sha256"


def hash_bytes(data: bytes) -> bytes:
    """SHA-256 digest of a raw byte string."""
    return hashlib.sha256(data).digest()


def xor(a: bytes, b: bytes) -> bytes:
    """Byte-wise XOR; operands must have equal length."""
    if len(a) != len(b):
        raise ValueError(f"xor operands differ in length ({len(a)} vs {len(b)})")
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(len(a), "big")


def concat(*parts: bytes) -> bytes:
    """Join byte strings with 4-octet big-endian length prefixes.

    The prefixes make the encoding injective: concat(b"A", b"B") and
    concat(b"AB") are distinct, unlike raw juxtaposition.
    """
    return b"".join(struct.pack(">I", len(part)) + part for part in parts)


def split_concat(blob: bytes) -> list[bytes]:
    """Recover the parts of a concat() encoding; rejects malformed input."""
    parts = []
    offset = 0
    while offset < len(blob):
        if offset + 4 > len(blob):
            raise ValueError("truncated length prefix")
        (length,) = struct.unpack_from(">I", blob, offset)
        offset += 4
        if offset + length > len(blob):
            raise ValueError("part extends past end of input")
        parts.append(blob[offset:offset + length])
        offset += length
    return parts


def h(*parts: bytes) -> bytes:
    """Protocol hash: a single part is hashed raw, several parts via concat()."""
    if len(parts) == 1:
        return hash_bytes(parts[0])
    return hash_bytes(concat(*parts))


class BlockRng:
    """Deterministic stream of DIGEST_LEN blocks for one (seed, label) pair.

    Streams with different labels are independent, and block i of a stream
    depends only on (seed, label, i), so actors can draw in any relative
    order without perturbing each other's values.
    """

    def __init__(self, seed: int, label: str = "root"):
        self._key = hash_bytes(concat(str(seed).encode("ascii"), label.encode("utf-8")))
        self._index = 0

    def next_block(self) -> bytes:
        block = hash_bytes(concat(self._key, struct.pack(">Q", self._index)))
        self._index += 1
        return block


def random_block(rng: BlockRng) -> bytes:
    """Draw the next DIGEST_LEN pseudo-random block from a seeded stream."""
    return rng.next_block()
