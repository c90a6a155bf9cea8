"""
Tests for ReportCache

Tests key generation, hit/miss accounting, LRU eviction and the
integration with the stability classifier.
"""
import time

from src.abel import abel0
from src.cache import ReportCache
from src.curve import Smooth
from src.stability import StabilityContext, classify


class TestCacheKeyGeneration:
    """Test cache key generation from canonical text and mode"""

    def test_generate_key_basic(self, report_cache):
        """
        Test basic cache key generation

        Verifies that keys are stable md5 digests.
        """
        key1 = report_cache._generate_key("sheaf|d=0", "canonical")
        key2 = report_cache._generate_key("sheaf|d=0", "canonical")

        assert key1 == key2
        assert isinstance(key1, str)
        assert len(key1) == 32  # md5 hex digest

    def test_generate_key_depends_on_mode(self, report_cache):
        """
        Test that the mode is part of the key

        A canonical and a Seshadri report of the same sheaf are distinct.
        """
        canonical = report_cache._generate_key("sheaf", "canonical")
        seshadri = report_cache._generate_key("sheaf", "seshadri")
        connected = report_cache._generate_key("sheaf", "canonical-connected")

        assert len({canonical, seshadri, connected}) == 3

    def test_generate_key_is_exact(self, report_cache):
        """Canonical texts are compared exactly, whitespace included"""
        assert report_cache._generate_key("a ", "canonical") != report_cache._generate_key("a", "canonical")


class TestCacheHitMiss:
    """Test cache hit and miss logic"""

    def test_cache_miss_on_first_query(self, report_cache):
        """
        Test that the first lookup is a miss

        Verifies that get returns None and counts a miss.
        """
        assert report_cache.get("unknown") is None
        assert report_cache.misses == 1
        assert report_cache.hits == 0

    def test_cache_hit_on_repeated_query(self, report_cache):
        """
        Test that a stored report is returned as is
        """
        report = object()
        report_cache.set("key", report)

        assert report_cache.get("key") is report
        assert report_cache.hits == 1

    def test_mode_separates_entries(self, report_cache):
        """A report stored under one mode is invisible under another"""
        report_cache.set("key", "canonical report", mode="canonical")

        assert report_cache.get("key", mode="seshadri") is None
        assert report_cache.get("key", mode="canonical") == "canonical report"

    def test_hit_rate_calculation(self, report_cache):
        """
        Test cache hit rate percentage calculation
        """
        assert report_cache.hit_rate == 0.0

        report_cache.get("q")
        assert report_cache.hit_rate == 0.0

        report_cache.set("q", "r")
        report_cache.get("q")
        assert report_cache.hit_rate == 50.0

        report_cache.get("q")
        assert abs(report_cache.hit_rate - 66.67) < 0.1
        assert report_cache.total_queries == 3


class TestLRUEviction:
    """Test LRU (Least Recently Used) eviction logic"""

    def test_eviction_when_at_capacity(self, small_cache):
        """
        Test that the oldest entry is evicted when the cache is full
        """
        small_cache.set("k1", 1)
        time.sleep(0.01)
        small_cache.set("k2", 2)
        time.sleep(0.01)
        small_cache.set("k3", 3)
        assert len(small_cache) == 3

        small_cache.set("k4", 4)

        assert len(small_cache) == 3
        assert small_cache.get("k1") is None
        assert small_cache.get("k4") == 4

    def test_recent_access_protects_entry(self, small_cache):
        """
        Test that reading an entry refreshes it

        Verifies that a hit moves the entry to the back of the eviction order.
        """
        small_cache.set("k1", 1)
        time.sleep(0.01)
        small_cache.set("k2", 2)
        time.sleep(0.01)
        small_cache.set("k3", 3)
        time.sleep(0.01)
        small_cache.get("k1")
        time.sleep(0.01)

        small_cache.set("k4", 4)

        assert small_cache.get("k1") == 1
        assert small_cache.get("k2") is None

    def test_overwrite_does_not_evict(self, small_cache):
        """Re-setting an existing key keeps the size unchanged"""
        for key in ("k1", "k2", "k3"):
            small_cache.set(key, key)
        small_cache.set("k2", "again")

        assert len(small_cache) == 3
        assert small_cache.get("k1") == "k1"
        assert small_cache.get("k2") == "again"

    def test_max_size_is_enforced(self):
        """
        Test that the cache never exceeds max_size
        """
        cache = ReportCache(max_size=5)
        for i in range(10):
            cache.set(f"k{i}", i)
            time.sleep(0.005)

        assert len(cache) == 5

    def test_eviction_follows_insertion_order_without_delays(self):
        """
        Test that back-to-back inserts evict exactly the oldest keys

        No sleeps between calls, so eviction cannot lean on clock resolution.
        """
        cache = ReportCache(max_size=4)
        for i in range(7):
            cache.set(f"k{i}", i)

        assert [cache.get(f"k{i}") for i in range(3)] == [None, None, None]
        assert [cache.get(f"k{i}") for i in range(3, 7)] == [3, 4, 5, 6]

    def test_hit_refreshes_entry_without_delays(self):
        """
        Test that a get moves an entry to the most recent position
        """
        cache = ReportCache(max_size=3)
        cache.set("a", 1)
        cache.set("b", 2)
        cache.set("c", 3)
        assert cache.get("a") == 1

        cache.set("d", 4)

        assert cache.get("b") is None
        assert cache.get("a") == 1
        assert cache.get("c") == 3

    def test_many_inserts_stay_bounded(self):
        """
        Test that a long run of inserts keeps the size at the limit
        """
        cache = ReportCache(max_size=100)
        for i in range(20000):
            cache.set(f"k{i}", i)

        assert len(cache) == 100
        assert cache.get("k19999") == 19999
        assert cache.get("k19899") is None


class TestCacheMaintenance:
    """Test cache maintenance operations"""

    def test_clear_keeps_statistics(self, report_cache):
        """
        Test that clear() empties the cache but keeps the counters
        """
        report_cache.get("k")
        report_cache.set("k", 1)
        report_cache.get("k")

        report_cache.clear()

        assert len(report_cache) == 0
        assert report_cache.hits == 1
        assert report_cache.misses == 1

    def test_cache_str_representation(self, report_cache):
        """Test the summary string"""
        report_cache.set("k", 1)
        report_cache.get("k")

        assert str(report_cache) == "ReportCache(size=1, hits=1, misses=0, hit_rate=100.0%)"


class TestClassifierIntegration:
    """The classifier reuses cached reports"""

    def test_second_classification_hits(self, fix_a, report_cache):
        """
        Test that classifying the same sheaf twice hits the cache

        Verifies that the cached report is the one returned.
        """
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))
        ctx = StabilityContext(fix_a, 0, "X1")

        first = classify(sheaf, ctx, cache=report_cache)
        second = classify(sheaf, ctx, cache=report_cache)

        assert second is first
        assert report_cache.hits == 1
        assert report_cache.misses == 1

    def test_context_is_part_of_key(self, fix_a, report_cache):
        """A different base point is a different cache entry"""
        sheaf = abel0(fix_a, "P", Smooth("X2", "Q"))

        classify(sheaf, StabilityContext(fix_a, 0, "X1"), cache=report_cache)
        classify(sheaf, StabilityContext(fix_a, 0, "X2"), cache=report_cache)

        assert report_cache.hits == 0
        assert len(report_cache) == 2
