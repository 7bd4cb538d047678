"""
Django settings for the opmean project.

opmean is a numerical toolkit: it has no URL surface, and the management
commands in the ``cli`` app are its entry points. Everything tunable comes
from the environment (optionally a ``.env`` file next to ``manage.py``).
"""

from __future__ import annotations

from pathlib import Path

import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env()
env_file = BASE_DIR / ".env"
if env_file.exists():
    environ.Env.read_env(env_file=env_file)


SECRET_KEY = env(
    "DJANGO_SECRET_KEY",
    default="django-insecure-opmean-local-only-7w9k2q",
)

DEBUG = env.bool("DJANGO_DEBUG", default=False)

ALLOWED_HOSTS: list[str] = env.list("DJANGO_ALLOWED_HOSTS", default=[])


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'matcore',
    'means',
    'divergences',
    'classical',
    'membership',
    'exponents',
    'channels',
    'projections',
    'cli',
]


# Database
# Only used for run records written with ``--record``.

DATABASES = {
    'default': env.db(
        "DATABASE_URL",
        default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}",
    )
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'STRICT_JSON': True,
    'UNAUTHENTICATED_USER': None,
}


# Numerical tolerances and caps. Read once per process through
# ``matcore.conf.numerics()``.

NUMERICS = {
    'EIG_ZERO_TOL': env.float("OPMEAN_EIG_ZERO_TOL", default=1e-10),
    'PSD_TOL': env.float("OPMEAN_PSD_TOL", default=1e-10),
    'DIM_CAP': env.int("OPMEAN_DIM_CAP", default=4096),
    'PERSP_TOL': env.float("OPMEAN_PERSP_TOL", default=1e-9),
    'THETA_TOL': env.float("OPMEAN_THETA_TOL", default=1e-7),
    'COMMUTE_TOL': env.float("OPMEAN_COMMUTE_TOL", default=1e-8),
    'LP_TOL': env.float("OPMEAN_LP_TOL", default=1e-9),
    'THREADS': env.int("OPMEAN_THREADS", default=1),
}

REPORT_SCHEMA_VERSION = 1
REPORT_DIR = Path(env("OPMEAN_REPORT_DIR", default=str(BASE_DIR / "reports")))


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'opmean': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'opmean',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': env("OPMEAN_LOG_LEVEL", default="WARNING"),
    },
}


DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
