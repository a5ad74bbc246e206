"""Checksummed JSON cache for discrete-log tables and coset enumerations.

Entries are keyed by (kind, p, parameter); every payload is stored with its
sha256 and verified on load; a mismatch rebuilds and warns.  Verdicts never
depend on cache state, only timings do.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from typing import Callable, Optional

ENV_VAR = "GL2TRIPLE_CACHE_DIR"


def cache_dir(explicit: str = "") -> str:
    if explicit:
        return explicit
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return os.path.join(base, "gl2triple")


def _path(directory: str, key: str) -> str:
    return os.path.join(directory, key + ".json")


def _checksum(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_or_build(directory: Optional[str], key: str, builder: Callable,
                  enabled: bool = True):
    """Return the payload for key, from a verified cache entry or freshly built.

    Returns (payload, hit) where hit reports whether the cache served it.
    """
    if not enabled or directory is None:
        return builder(), False
    path = _path(directory, key)
    if os.path.exists(path):
        try:
            with open(path) as fh:
                entry = json.load(fh)
            if entry.get("sha256") == _checksum(entry["payload"]):
                return entry["payload"], True
            print("warning: cache checksum mismatch for %s; rebuilding" % key,
                  file=sys.stderr)
        except (ValueError, KeyError, OSError):
            print("warning: unreadable cache entry %s; rebuilding" % key,
                  file=sys.stderr)
    payload = builder()
    try:
        os.makedirs(directory, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"payload": payload, "sha256": _checksum(payload)}, fh)
        os.replace(tmp, path)
    except OSError:
        pass
    return payload, False


def warm_unit_groups(directory: Optional[str], p: int, max_m: int,
                     enabled: bool = True) -> int:
    """Build (or load) the discrete-log tables for (Z/p^m)^x, m <= max_m."""
    from .characters import UnitGroup
    hits = 0
    for m in range(1, max_m + 1):
        def build(m=m):
            grp = UnitGroup(p, m)
            return {str(u): list(e) for u, e in grp.dlog.items()}
        payload, hit = load_or_build(directory, "dlog-%d-%d" % (p, m), build,
                                     enabled)
        UnitGroup(p, m, dlog_data=payload)
        hits += int(hit)
    return hits


def warm_coset_tables(directory: Optional[str], ctx, max_level: int,
                      enabled: bool = True) -> int:
    """Build (or load+verify) the coset point keys for levels <= max_level."""
    hits = 0
    for level in range(1, max_level + 1):
        def build(level=level):
            t = ctx.point_table(level)
            return [[k, r] for k, r in t.keys]
        payload, hit = load_or_build(directory, "coset-%d-%d" % (ctx.p, level),
                                     build, enabled)
        t = ctx.point_table(level)
        if [[k, r] for k, r in t.keys] != [list(e) for e in payload]:
            print("warning: coset cache for (%d, %d) disagreed; using rebuild"
                  % (ctx.p, level), file=sys.stderr)
        hits += int(hit)
    return hits


def clear(directory: str) -> int:
    if not os.path.isdir(directory):
        return 0
    n = 0
    for name in os.listdir(directory):
        if name.endswith(".json"):
            os.remove(os.path.join(directory, name))
            n += 1
    return n
