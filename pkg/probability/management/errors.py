"""
Exit codes shared by the probability management commands.
"""
from contextlib import contextmanager

from django.core.management.base import CommandError

from probability.exceptions import DistkitError, KLNotImplemented, ModelSpecError

EXIT_SELFCHECK_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_VALIDATION_ERROR = 3
EXIT_KL_NOT_IMPLEMENTED = 4


@contextmanager
def translate_errors():
    """Re-raise library errors as CommandError carrying the command's exit code."""
    try:
        yield
    except ModelSpecError as exc:
        raise CommandError(f'Invalid model spec: {exc}', returncode=EXIT_PARSE_ERROR) from exc
    except KLNotImplemented as exc:
        raise CommandError(str(exc), returncode=EXIT_KL_NOT_IMPLEMENTED) from exc
    except DistkitError as exc:
        raise CommandError(f'Invalid parameters: {exc}', returncode=EXIT_VALIDATION_ERROR) from exc
