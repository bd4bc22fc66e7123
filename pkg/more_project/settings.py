"""
Django settings for more_project project.

The project has no web surface: Django provides configuration, the ORM that
stores benchmark results, form validation of training configurations,
management commands (the CLI) and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

from pathlib import Path
import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env()
environ.Env.read_env(BASE_DIR / '.env')  # Reads from .env file when present

SECRET_KEY = env("DJANGO_SECRET_KEY", default="more-project-local-key")

DEBUG = env.bool("DJANGO_DEBUG", default=False)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django_filters',
    'rest_framework',
    'more_app.apps.MoreAppConfig',
]


# Database
# https://docs.djangoproject.com/en/5.1/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': env("MORE_DB_PATH", default=str(BASE_DIR / 'db.sqlite3')),
    }
}


# Training defaults, overridable per environment.
# Values follow the experimental protocol: Adam at lr 0.01, 300 epochs,
# dropout 0.5, L2 factor 0.0005, early-stopping tolerance 30.
MORE = {
    'LR': env.float("MORE_LR", default=0.01),
    'MAX_EPOCH': env.int("MORE_MAX_EPOCH", default=300),
    'DROPOUT': env.float("MORE_DROPOUT", default=0.5),
    'L2': env.float("MORE_L2", default=0.0005),
    'TOLERANCE': env.int("MORE_TOLERANCE", default=30),
    'EMBED_DIM': env.int("MORE_EMBED_DIM", default=256),
    'EMBED_DIM_SWEEP': [32, 64, 128, 256, 512],
    'SEED': env.int("MORE_SEED", default=0),
    'CENSUS_GUARD': env.int("MORE_CENSUS_GUARD", default=64),
    'LOG_EVERY': env.int("MORE_LOG_EVERY", default=50),
}


# Logging
MORE_LOG_LEVEL = env("MORE_LOG_LEVEL", default="WARNING")  # Change to "INFO" or "DEBUG" to follow training runs

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "{levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": MORE_LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": MORE_LOG_LEVEL,
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "more_app": {
            "handlers": ["console"],
            "level": MORE_LOG_LEVEL,
            "propagate": False,
        },
    },
}

# Internationalization
# https://docs.djangoproject.com/en/5.1/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.1/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
