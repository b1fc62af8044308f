"""
Celery tasks for the probability app.
"""
import logging

from celery import group, shared_task

from .selfcheck import SUITES, run_suite, run_suites

logger = logging.getLogger('probability')


@shared_task(bind=True, max_retries=3, default_retry_delay=60)
def run_selfcheck_task(self, seed=None):
    """
    Celery task running every selfcheck suite in one worker.
    """
    try:
        report = run_suites(seed)
        logger.info(f"Selfcheck finished (seed {seed}): {'passed' if report['passed'] else 'FAILED'}")
        return report
    except Exception as exc:
        logger.error(f"Error running selfcheck (seed {seed}): {exc}", exc_info=True)
        raise self.retry(exc=exc, countdown=60)


@shared_task(bind=True, max_retries=3, default_retry_delay=60)
def run_selfcheck_suite_task(self, name: str, seed=None):
    """
    Celery task running a single selfcheck suite.
    """
    try:
        return run_suite(name, seed)
    except Exception as exc:
        logger.error(f"Error running selfcheck suite {name}: {exc}", exc_info=True)
        raise self.retry(exc=exc, countdown=60)


def dispatch_selfcheck(seed=None):
    """Fan the suites out as one Celery group; returns the GroupResult."""
    job = group(run_selfcheck_suite_task.s(name, seed) for name in SUITES)
    result = job.apply_async()
    logger.info(f"Dispatched {len(SUITES)} selfcheck suites as group {result.id}")
    return result
