"""
Runtime configuration lookups for the probability app.

Values come from Django settings when they are configured, otherwise from
the environment, so the library also works outside ``manage.py``.
"""
import os

from django.conf import settings

_DEFAULTS = {
    'DISTKIT_CACHE': True,
    'DISTKIT_CACHE_SIZE': 16,
    'DISTKIT_DEFAULT_PRECISION': 'f64',
    'DISTKIT_VALIDATE_ARGS': False,
    'DISTKIT_SELFCHECK_SEEDS': (11, 22, 33),
    'DISTKIT_SELFCHECK_SAMPLES': 20000,
}


def get_setting(name):
    """Return a distkit setting, falling back to env and then the default."""
    if settings.configured:
        return getattr(settings, name, _DEFAULTS[name])
    if name == 'DISTKIT_CACHE':
        return os.getenv('DISTKIT_CACHE', 'on').lower() != 'off'
    if name == 'DISTKIT_CACHE_SIZE':
        return int(os.getenv('DISTKIT_CACHE_SIZE', '16'))
    return _DEFAULTS[name]


def cache_enabled() -> bool:
    return bool(get_setting('DISTKIT_CACHE'))


def cache_size() -> int:
    return int(get_setting('DISTKIT_CACHE_SIZE'))
