"""Work counters for the numerics: Lerch series terms, response-cache use, oracle quadrature and stage timings"""

import logging
import time
from collections import defaultdict
from functools import wraps
from typing import Dict, List

logger = logging.getLogger(__name__)


class MetricsCollector:
    """
    Counts the numerical work done in this process.

    Worker processes of a pool keep their own collector, so a parallel scan
    only shows up here through its stage timing.
    """

    def __init__(self):
        self.reset()

    def reset(self):
        """Zero every counter"""
        self.lerch_evaluations: int = 0
        self.lerch_terms: int = 0
        self.lerch_max_terms: int = 0
        self.lerch_accelerated: int = 0
        self.cache_hits: int = 0
        self.cache_misses: int = 0
        self.quad_calls: int = 0
        self.quad_warnings: int = 0
        self.extrapolations: int = 0
        self.divergences: int = 0
        self.stage_seconds: Dict[str, List[float]] = defaultdict(list)
        self.stage_failures: Dict[str, int] = defaultdict(int)

    def record_lerch(self, n_terms: int, accelerated: bool = False):
        """Record one Lerch evaluation and the number of series terms it summed"""
        self.lerch_evaluations += 1
        self.lerch_terms += n_terms
        self.lerch_max_terms = max(self.lerch_max_terms, n_terms)
        if accelerated:
            self.lerch_accelerated += 1

    def record_cache_hit(self):
        self.cache_hits += 1

    def record_cache_miss(self):
        self.cache_misses += 1

    def record_quad(self, calls: int, warnings: int = 0):
        """Record scipy quad calls and the integration warnings they raised"""
        self.quad_calls += calls
        self.quad_warnings += warnings

    def record_extrapolation(self, diverged: bool = False):
        """Record one regulator sweep handed to the extrapolation"""
        self.extrapolations += 1
        if diverged:
            self.divergences += 1

    def record_stage(self, stage: str, elapsed: float, failed: bool = False):
        self.stage_seconds[stage].append(elapsed)
        if failed:
            self.stage_failures[stage] += 1

    def cache_hit_rate(self) -> float:
        """Response-cache hit rate in percent"""
        total = self.cache_hits + self.cache_misses
        return 100.0 * self.cache_hits / total if total else 0.0

    def get_stats(self) -> Dict:
        return {
            "lerch": {
                "evaluations": self.lerch_evaluations,
                "terms": self.lerch_terms,
                "mean_terms": self.lerch_terms / self.lerch_evaluations if self.lerch_evaluations else 0.0,
                "max_terms": self.lerch_max_terms,
                "accelerated": self.lerch_accelerated,
            },
            "response_cache": {
                "hits": self.cache_hits,
                "misses": self.cache_misses,
                "hit_rate": self.cache_hit_rate(),
            },
            "oracle": {
                "quad_calls": self.quad_calls,
                "quad_warnings": self.quad_warnings,
                "extrapolations": self.extrapolations,
                "divergences": self.divergences,
            },
            "stages": {
                stage: {
                    "runs": len(times),
                    "failures": self.stage_failures.get(stage, 0),
                    "total_seconds": sum(times),
                    "max_seconds": max(times),
                }
                for stage, times in self.stage_seconds.items()
            },
        }


# Process-wide collector
metrics = MetricsCollector()


def track_performance(stage: str):
    """
    Decorator recording the wall time of a pipeline stage and whether it raised.

    Args:
        stage: Name the timing is filed under
    """

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            failed = False

            try:
                return func(*args, **kwargs)
            except Exception:
                failed = True
                raise
            finally:
                elapsed = time.perf_counter() - start_time
                metrics.record_stage(stage, elapsed, failed)

                if failed:
                    logger.warning(f"{stage} failed in {elapsed:.3f}s")
                else:
                    logger.debug(f"{stage} completed in {elapsed:.3f}s")

        return wrapper

    return decorator


def get_metrics() -> Dict:
    """Snapshot of all counters"""
    return metrics.get_stats()


def reset_metrics():
    metrics.reset()
