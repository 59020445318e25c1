"""
Django settings for PrivacyRisk project.

Generated by 'django-admin startproject' using Django 5.2.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from datetime import timedelta
import os
import dj_database_url

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-cprt-local-development-key-change-me')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', 'True') == 'True'

ALLOWED_HOSTS = os.environ.get('DJANGO_ALLOWED_HOSTS', '127.0.0.1,localhost').split(',')


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'cprt',
    'drf_yasg',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'PrivacyRisk.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'PrivacyRisk.wsgi.application'


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

# DATABASE_URL points at PostgreSQL in docker-compose; without it a local SQLite file is used
DATABASES = {
    'default': dj_database_url.config(
        default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}",
        conn_max_age=600,
    )
}


# Password validation
# https://docs.djangoproject.com/en/5.2/ref/settings/#auth-password-validators

AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.CommonPasswordValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.NumericPasswordValidator',
    },
]


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/5.2/howto/static-files/

STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

# Redis and Celery Configuration
REDIS_HOST = os.environ.get('REDIS_HOST', 'localhost')
REDIS_PORT = os.environ.get('REDIS_PORT', 6379)

# Celery Configuration
CELERY_BROKER_URL = f'redis://{REDIS_HOST}:{REDIS_PORT}/0'
CELERY_RESULT_BACKEND = f'redis://{REDIS_HOST}:{REDIS_PORT}/0'
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE

# Taxonomy Configuration
CPRT_TAXONOMY_PATH = os.environ.get('CPRT_TAXONOMY_PATH', str(BASE_DIR / 'cprt' / 'assets' / 'cprt_canonical.json'))
CPRT_BOUNDARY_PATH = os.environ.get('CPRT_BOUNDARY_PATH') or None  # unset = canonical boundaries
CPRT_REGISTRY_CACHE_TIMEOUT = int(os.environ.get('CPRT_REGISTRY_CACHE_TIMEOUT', 3600))  # seconds

# Evaluation Configuration
CPRT_SEED = int(os.environ.get('CPRT_SEED', 42))
CPRT_MAX_PAIRS = int(os.environ.get('CPRT_MAX_PAIRS', 10000))  # per pair mode
CPRT_THREADS = int(os.environ.get('CPRT_THREADS', 1))

# Boundary Derivation Configuration
CPRT_EMBEDDING = {
    'dim': int(os.environ.get('CPRT_EMBEDDING_DIM', 16)),
    'base_margin': 0.10,
    'ordinal_scale': 0.12,
    'epochs': int(os.environ.get('CPRT_EMBEDDING_EPOCHS', 30)),
    'learning_rate': float(os.environ.get('CPRT_EMBEDDING_LR', 1e-3)),
    'batch_size': int(os.environ.get('CPRT_EMBEDDING_BATCH_SIZE', 64)),
    'weight_decay': 0.01,
    'init_scale': 0.1,
}
CPRT_IDW_EPS = float(os.environ.get('CPRT_IDW_EPS', 1e-8))
CPRT_BOUNDARY_PERCENTILE = float(os.environ.get('CPRT_BOUNDARY_PERCENTILE', 5.0))
CPRT_BOUNDARY_MIN_WIDTH = float(os.environ.get('CPRT_BOUNDARY_MIN_WIDTH', 0.01))
CPRT_JOB_RETENTION_HOURS = int(os.environ.get('CPRT_JOB_RETENTION_HOURS', 72))

# Redis Cache Configuration
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.redis.RedisCache',
        'LOCATION': f'redis://{REDIS_HOST}:{REDIS_PORT}/1',
    }
}

# Celery Beat Schedule for Periodic Tasks
CELERY_BEAT_SCHEDULE = {
    'cleanup-old-jobs': {
        'task': 'cprt.tasks.cleanup_old_jobs',
        'schedule': timedelta(hours=6),
    },
}

# Logging: diagnostics go to stderr, command results stay on stdout
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'cprt': {
            'handlers': ['console'],
            'level': os.environ.get('CPRT_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
