"""Persistent Gram-system cache.

One JSON file per (canonical polynomial text, r, requested precision); decimal
strings carry the matrix entries exactly. Writes go through a temp file and a
rename so concurrent runs sharing a directory never observe a torn file, and
reads bump the mtime so eviction is least-recently-used.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .dpcore import DirichletPolynomial
from .exact import as_fraction
from .numio import mpc_to_pair, pair_to_mpc
from .precision import working

CACHE_VERSION = 1


def _key(P: DirichletPolynomial, r, bits: int) -> str:
    text = f"{P.to_text()}|{as_fraction(r)}|{bits}"
    return hashlib.sha256(text.encode()).hexdigest()[:32]


def cache_path(cache_dir, P: DirichletPolynomial, r, bits: int) -> Path:
    return Path(cache_dir) / f"xdp-gram-{_key(P, r, bits)}.json"


@dataclass(frozen=True)
class LoadedGram:
    n: int
    G: list
    g: list
    precision_bits: int


def store_gram(cache_dir, P: DirichletPolynomial, r, bits: int,
               n: int, G, g, actual_bits: int) -> Path:
    """Atomically persist an n-generator system under the request key."""
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": CACHE_VERSION,
        "poly": P.to_text(),
        "r": str(as_fraction(r)),
        "n": n,
        "precision_bits": actual_bits,
        "G": [[mpc_to_pair(G[i][j], actual_bits) for j in range(n)]
              for i in range(n)],
        "g": [mpc_to_pair(g[i], actual_bits) for i in range(n)],
    }
    path = cache_path(cache_dir, P, r, bits)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_gram(cache_dir, P: DirichletPolynomial, r, bits: int,
              n_min: int) -> Optional[LoadedGram]:
    """Stored system if it covers at least n_min generators, else None.

    A hit refreshes the file's mtime. Unreadable or mismatched files are
    treated as misses, never as errors.
    """
    path = cache_path(cache_dir, P, r, bits)
    try:
        payload = json.loads(path.read_text())
        if payload["version"] != CACHE_VERSION or payload["n"] < n_min \
                or payload["poly"] != P.to_text():
            return None
        n = payload["n"]
        stored_bits = payload["precision_bits"]
        with working(stored_bits):
            G = [[pair_to_mpc(payload["G"][i][j], stored_bits) for j in range(n)]
                 for i in range(n)]
            g = [pair_to_mpc(payload["g"][i], stored_bits) for i in range(n)]
    except (OSError, ValueError, KeyError, TypeError, IndexError):
        return None
    os.utime(path)
    return LoadedGram(n=n, G=G, g=g, precision_bits=stored_bits)


def cache_gc(cache_dir, max_bytes: int) -> int:
    """Evict least-recently-used entries until the directory fits. Returns
    the number of files removed."""
    directory = Path(cache_dir)
    if not directory.is_dir():
        return 0
    entries = []
    for path in directory.glob("xdp-gram-*.json"):
        try:
            st = path.stat()
        except OSError:
            continue
        entries.append((st.st_mtime, st.st_size, path))
    entries.sort(key=lambda e: e[0], reverse=True)      # newest first
    kept = 0
    evicted = 0
    for mtime, size, path in entries:
        if kept + size <= max_bytes:
            kept += size
        else:
            try:
                path.unlink()
                evicted += 1
            except OSError:
                pass
    return evicted
