"""
Django settings for the distkit project.
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-change-this-in-production')
DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')

# Application definition
INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',
    # Local apps
    'probability',
]

# distkit has no models and runs without a database
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = os.getenv('TIMEZONE', 'UTC')
USE_I18N = True
USE_TZ = True

# Distribution library configuration
DISTKIT_CACHE = os.getenv('DISTKIT_CACHE', 'on').lower() != 'off'
DISTKIT_CACHE_SIZE = int(os.getenv('DISTKIT_CACHE_SIZE', '16'))
DISTKIT_DEFAULT_PRECISION = os.getenv('DISTKIT_PRECISION', 'f64')
DISTKIT_VALIDATE_ARGS = os.getenv('DISTKIT_VALIDATE_ARGS', 'False').lower() == 'true'
DISTKIT_SELFCHECK_SEEDS = tuple(
    int(s) for s in os.getenv('DISTKIT_SELFCHECK_SEEDS', '11,22,33').split(',') if s.strip()
)
DISTKIT_SELFCHECK_SAMPLES = int(os.getenv('DISTKIT_SELFCHECK_SAMPLES', '20000'))

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
CELERY_TASK_ALWAYS_EAGER = os.getenv('CELERY_TASK_ALWAYS_EAGER', 'False').lower() == 'true'
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes
CELERY_TASK_SOFT_TIME_LIMIT = 25 * 60  # 25 minutes
CELERY_TASK_ACKS_LATE = True
CELERY_WORKER_PREFETCH_MULTIPLIER = 1

# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': os.getenv('DJANGO_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'probability': {
            'handlers': ['console'],
            'level': os.getenv('DISTKIT_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
