"""Disk cache of dense order tables, one ``EOT1`` file per prime.

Writes go to a temporary file in the cache directory followed by
``os.replace``, so concurrent processes sharing a directory only ever see
complete files. Unreadable files are rebuilt with a warning.
"""

from __future__ import annotations

import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .curves import (
    DEFAULT_TABLE_BUDGET,
    OrderTable,
    TableBudgetError,
    build_order_table,
    check_prime_field,
    table_bytes,
)

log = logging.getLogger(__name__)

TMP_PREFIX = ".tmp-eot1-"


@dataclass(frozen=True)
class CacheEntry:
    p: int
    path: Path
    size: int
    valid: bool


class OrderTableCache:
    def __init__(self, cache_dir, budget: int = DEFAULT_TABLE_BUDGET):
        self.cache_dir = Path(cache_dir)
        self.budget = int(budget)

    def path_for(self, p: int) -> Path:
        return self.cache_dir / f"p{p:08d}.eot1"

    def _read(self, p: int) -> OrderTable:
        table = OrderTable.from_bytes(self.path_for(p).read_bytes())
        if table.p != p:
            raise ValueError(f"cache file for p={p} holds p={table.p}")
        return table

    def _write(self, table: OrderTable) -> None:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, prefix=TMP_PREFIX)
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(table.to_bytes())
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path_for(table.p))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    def get_or_build(self, p: int) -> OrderTable:
        check_prime_field(p)
        need = table_bytes(p)
        if need > self.budget:
            raise TableBudgetError(p, need, self.budget)
        path = self.path_for(p)
        if path.exists():
            try:
                return self._read(p)
            except (ValueError, OSError) as exc:
                log.warning("rebuilding order table %s: %s", path, exc)
        table = build_order_table(p, self.budget)
        self._write(table)
        return table

    __call__ = get_or_build

    def warm(self, primes, workers: int = 1) -> list[int]:
        primes = sorted(set(int(p) for p in primes))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                list(pool.map(self.get_or_build, primes))
        else:
            for p in primes:
                self.get_or_build(p)
        return primes

    def entries(self) -> list[CacheEntry]:
        if not self.cache_dir.is_dir():
            return []
        out = []
        for path in sorted(self.cache_dir.glob("p*.eot1")):
            try:
                p = int(path.stem[1:])
            except ValueError:
                continue
            size = path.stat().st_size
            out.append(CacheEntry(p, path, size, size == table_bytes(p) and _magic_ok(path)))
        return out

    def gc(self, remove_all: bool = False) -> list[Path]:
        """Delete stray temp files and invalid tables (every table with remove_all)."""
        removed = []
        if not self.cache_dir.is_dir():
            return removed
        for path in self.cache_dir.glob(TMP_PREFIX + "*"):
            path.unlink(missing_ok=True)
            removed.append(path)
        for entry in self.entries():
            if remove_all or not entry.valid:
                entry.path.unlink(missing_ok=True)
                removed.append(entry.path)
        return removed


def _magic_ok(path: Path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(4) == b"EOT1"
