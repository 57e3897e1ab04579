"""Stable seed derivation for independent random streams."""

import hashlib
from typing import Union

SEED_MASK = (1 << 63) - 1


def derive_seed(base: int, *keys: Union[int, str]) -> int:
    """Derive a child seed from a base seed and a path of keys.

    Uses blake2b rather than hash() so values are identical across processes and runs.
    """
    digest = hashlib.blake2b(digest_size=8)
    digest.update(str(int(base)).encode())
    for key in keys:
        digest.update(b"/")
        digest.update(str(key).encode())
    return int.from_bytes(digest.digest(), "big") & SEED_MASK
