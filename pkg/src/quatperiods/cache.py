"""On-disk JSON cache for per-prime class data and Brandt matrices.

Layout: <root>/q<q>/classes.json holds the right-ideal classes, weights,
and left orders; <root>/q<q>/brandt_<n>.json holds one Brandt matrix.
Integers that may not fit in 64 bits are stored as decimal strings so the
files stay portable across JSON readers. A lock file in each per-prime
directory keeps the cache single-writer; readers never take the lock.
"""

from __future__ import annotations

import json
import os
import time
from contextlib import contextmanager

from .quatalg import (
    Lattice,
    ShimuraSet,
    brandt_matrix,
    build_algebra,
    maximal_order,
    right_ideal_classes,
)

_BIG = 1 << 63


def encode_int(v: int):
    return str(v) if abs(v) >= _BIG else v


def decode_int(v) -> int:
    return int(v)


def _encode_lattice(L: Lattice) -> dict:
    return {"rows": [[encode_int(c) for c in row] for row in L.rows],
            "den": encode_int(L.den)}


def _decode_lattice(d: dict) -> Lattice:
    return Lattice.make([[decode_int(c) for c in row] for row in d["rows"]],
                        decode_int(d["den"]))


class CacheBusy(RuntimeError):
    """Another process holds the writer lock for this cache directory."""


class Cache:
    def __init__(self, root: str):
        self.root = root

    def qdir(self, q: int) -> str:
        return os.path.join(self.root, f"q{q}")

    def path(self, q: int, name: str) -> str:
        return os.path.join(self.qdir(q), name)

    @contextmanager
    def writer_lock(self, q: int, timeout: float = 5.0):
        os.makedirs(self.qdir(q), exist_ok=True)
        lock = self.path(q, ".lock")
        deadline = time.monotonic() + timeout
        while True:
            try:
                fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                break
            except FileExistsError:
                if time.monotonic() >= deadline:
                    raise CacheBusy(f"writer lock busy: {lock}")
                time.sleep(0.05)
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield
        finally:
            os.unlink(lock)

    def load(self, q: int, name: str):
        try:
            with open(self.path(q, name)) as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None

    def store(self, q: int, name: str, payload: dict):
        with self.writer_lock(q):
            tmp = self.path(q, name + ".tmp")
            with open(tmp, "w") as fh:
                json.dump(payload, fh, indent=1, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, self.path(q, name))


def shimura_payload(X: ShimuraSet) -> dict:
    return {
        "q": X.alg.q,
        "order": _encode_lattice(X.order),
        "classes": [_encode_lattice(L) for L in X.classes],
        "left_orders": [_encode_lattice(L) for L in X.left_orders],
        "weights": list(X.weights),
    }


def shimura_from_payload(payload: dict) -> ShimuraSet:
    alg = build_algebra(payload["q"])
    return ShimuraSet(
        alg,
        _decode_lattice(payload["order"]),
        [_decode_lattice(d) for d in payload["classes"]],
        [decode_int(w) for w in payload["weights"]],
        [_decode_lattice(d) for d in payload["left_orders"]],
    )


def get_shimura_set(cache: Cache, q: int) -> ShimuraSet:
    payload = cache.load(q, "classes.json")
    if payload is not None:
        return shimura_from_payload(payload)
    alg = build_algebra(q)
    X = right_ideal_classes(maximal_order(alg), alg)
    cache.store(q, "classes.json", shimura_payload(X))
    return X


def get_brandt(cache: Cache, X: ShimuraSet, n: int):
    q = X.alg.q
    payload = cache.load(q, f"brandt_{n}.json")
    if payload is not None:
        return [[decode_int(c) for c in row] for row in payload["matrix"]]
    B = brandt_matrix(X, n)
    cache.store(q, f"brandt_{n}.json", {
        "n": n, "matrix": [[encode_int(c) for c in row] for row in B]})
    return B


def resolve_cache_dir(flag_value, config: dict) -> str:
    """Precedence: TPL_CACHE environment > command-line flag > config key."""
    env = os.environ.get("TPL_CACHE")
    if env:
        return env
    if flag_value:
        return flag_value
    return config.get("cache_dir", "cache")
