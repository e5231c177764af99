"""Seed splitting.

Every random stream is derived from one root seed and a path of keys:
``SeedSequence([root, *keys]).generate_state(1, uint32)``, with string keys
mapped to integers by their UTF-8 bytes (little endian).  A sub-experiment can
be rerun alone from its derived seed.
"""
from __future__ import annotations

import numpy as np


def _key(k) -> int:
    if isinstance(k, str):
        return int.from_bytes(k.encode("utf-8"), "little")
    return int(k)


def derive_seed(root: int, *keys) -> int:
    ss = np.random.SeedSequence([int(root)] + [_key(k) for k in keys])
    return int(ss.generate_state(1, np.uint32)[0])
