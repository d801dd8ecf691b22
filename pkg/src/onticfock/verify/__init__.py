"""Verification engine: named checks, suites, reports."""

import time
from concurrent.futures import ThreadPoolExecutor

from .. import __version__
from .checks import (
    CheckResult,
    check,
    check_completeness,
    check_eigenrelation,
    check_operator_identity,
    check_orthonormality,
    check_permutation,
    gram_matrix,
)
from .config import SUITES, RunConfig, config_from_dict, load_config
from .report import Report
from .suites import SUITE_BUILDERS, rng_for

__all__ = [
    "CheckResult", "Report", "RunConfig", "SUITES",
    "check", "check_completeness", "check_eigenrelation", "check_operator_identity",
    "check_orthonormality", "check_permutation", "config_from_dict", "gram_matrix",
    "load_config", "rng_for", "run_suite", "suite_tasks",
]


def suite_tasks(config: RunConfig) -> list:
    tasks = []
    for name in config.suites:
        tasks.extend(SUITE_BUILDERS[name](config))
    ids = [cid for cid, _ in tasks]
    if len(ids) != len(set(ids)):
        raise ValueError("suite schedule produced duplicate check ids")
    return tasks


def _timed(cid, thunk):
    start = time.perf_counter()
    result = thunk()
    if result.id != cid:
        raise RuntimeError(f"task {cid} returned result for {result.id}")
    result.wall_clock = time.perf_counter() - start
    return result


def run_suite(config: RunConfig = None) -> Report:
    """Run every check of the selected suites and collect a :class:`Report`."""
    config = (config or RunConfig()).validate()
    tasks = suite_tasks(config)
    if config.workers == 1:
        results = [_timed(cid, fn) for cid, fn in tasks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda task: _timed(*task), tasks))
    return Report(
        results,
        config.flat(),
        __version__,
        config.seed,
        config.expected_fail_policy,
        list(config.suites),
    )
