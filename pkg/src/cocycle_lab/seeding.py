"""Deterministic child seeds: every stochastic step hashes (root, label, index)."""
import hashlib

import numpy as np


def child_seed(root: int, label: str, index: int = 0) -> int:
    digest = hashlib.blake2b(f"{int(root)}|{label}|{int(index)}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def child_rng(root: int, label: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(child_seed(root, label, index))
