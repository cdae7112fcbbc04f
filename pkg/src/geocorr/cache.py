"""Flat binary cache for expensive sub-results.

Files carry a magic header and a version byte in front of an npz
payload; anything unreadable or from another version is treated as a
miss.  Keys are hashes of the (command, parameters) pair so reruns with
identical configuration reuse results.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

MAGIC = b"GCOR"
VERSION = 1


def config_key(command: str, **params) -> str:
    payload = command + "|" + "|".join(
        f"{k}={params[k]!r}" for k in sorted(params))
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def cache_path(cache_dir: str, key: str) -> str:
    return os.path.join(cache_dir, key + ".bin")


def save_arrays(cache_dir: str, key: str, arrays: dict) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, key)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        np.savez(fh, **arrays)
    os.replace(tmp, path)


def load_arrays(cache_dir: str, key: str):
    """The cached dict of arrays, or None on any kind of miss."""
    path = cache_path(cache_dir, key)
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != MAGIC or fh.read(1) != bytes([VERSION]):
                return None
            with np.load(fh, allow_pickle=False) as npz:
                return {k: npz[k] for k in npz.files}
    except (OSError, ValueError):
        return None
