"""
Report cache with LRU eviction
Memoises stability reports across repeated theorem-suite queries
"""
import hashlib
import logging
import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Optional

from .config import REPORT_CACHE_SIZE

logger = logging.getLogger(__name__)


@dataclass
class CacheEntry:
    """Cache entry with the stored report and metadata"""
    report: Any
    timestamp: float
    mode: str = "canonical"


class ReportCache:
    """
    In-memory report cache with LRU eviction

    Features:
    - md5 keys over the canonical text of (sheaf, context, mode)
    - Least-recently-used eviction in constant time (OrderedDict)
    - Cache statistics tracking
    """

    def __init__(self, max_size: int = REPORT_CACHE_SIZE):
        self.max_size = max_size
        self.cache: "OrderedDict[str, CacheEntry]" = OrderedDict()

        # Statistics
        self.hits = 0
        self.misses = 0
        self.total_queries = 0

    def _generate_key(self, text: str, mode: str) -> str:
        """Generate cache key from canonical text and mode"""
        return hashlib.md5(f"{mode}|{text}".encode()).hexdigest()

    def get(self, text: str, mode: str = "canonical") -> Optional[Any]:
        """
        Retrieve a cached report

        Returns:
            the report on a hit, None on a miss
        """
        self.total_queries += 1
        key = self._generate_key(text, mode)

        entry = self.cache.get(key)
        if entry is None:
            self.misses += 1
            return None

        self.hits += 1
        entry.timestamp = time.monotonic()
        self.cache.move_to_end(key)
        logger.debug("report cache hit (%s)", mode)
        return entry.report

    def set(self, text: str, report: Any, mode: str = "canonical"):
        """Cache a report"""
        key = self._generate_key(text, mode)

        if key in self.cache:
            self.cache.move_to_end(key)
        elif len(self.cache) >= self.max_size:
            # Evict least recently used entry
            self.cache.popitem(last=False)

        self.cache[key] = CacheEntry(report=report, timestamp=time.monotonic(), mode=mode)

    def clear(self):
        """Clear all cached entries"""
        self.cache.clear()

    @property
    def hit_rate(self) -> float:
        """Calculate cache hit rate percentage"""
        if self.total_queries == 0:
            return 0.0
        return (self.hits / self.total_queries) * 100

    def __len__(self):
        return len(self.cache)

    def __str__(self):
        return f"ReportCache(size={len(self)}, hits={self.hits}, misses={self.misses}, hit_rate={self.hit_rate:.1f}%)"
