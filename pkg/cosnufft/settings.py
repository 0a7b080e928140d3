"""
Django settings for the cosnufft project.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-cosnufft-local-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1,testserver').split(',')


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'django.contrib.staticfiles',

    # Third-party apps
    'rest_framework',
    'drf_yasg',

    # Local apps
    'common',
    'charfn',
    'cosrange',
    'cosclassic',
    'nufft',
    'nufftpricer',
    'bench',
    'frontend',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'cosnufft.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
            ],
        },
    },
]

WSGI_APPLICATION = 'cosnufft.wsgi.application'


# The pricer keeps no persistent state; a database is configured only so
# that Django's checks have one.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Spectral coefficients are reused across strike batches of one maturity.
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
    },
    'spectral': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'cosnufft-spectral',
        'TIMEOUT': None,
        'OPTIONS': {
            'MAX_ENTRIES': int(os.getenv('SPECTRAL_CACHE_ENTRIES', '64')),
        },
    },
}
SPECTRAL_CACHE_ALIAS = 'spectral'


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

STATIC_URL = '/static/'
STATIC_ROOT = os.path.join(BASE_DIR, 'staticfiles')

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Django REST Framework settings
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}

# Pricing defaults
COSNUFFT_OUTPUT_DIR = os.getenv('COSNUFFT_OUTPUT_DIR', str(BASE_DIR / 'out'))
COS_DEFAULT_L = float(os.getenv('COS_DEFAULT_L', '8.0'))
COS_DEFAULT_M = int(os.getenv('COS_DEFAULT_M', '256'))
NUFFT_DEFAULT_TOLERANCE = float(os.getenv('NUFFT_DEFAULT_TOLERANCE', '1e-9'))
NUFFT_STRICT_TOLERANCE = float(os.getenv('NUFFT_STRICT_TOLERANCE', '1e-16'))
NUFFT_OVERSAMPLING = float(os.getenv('NUFFT_OVERSAMPLING', '2.0'))
NUFFT_DIRECT_CROSSOVER = int(os.getenv('NUFFT_DIRECT_CROSSOVER', str(2 ** 14)))
PRICING_THREADS = int(os.getenv('PRICING_THREADS', '1'))

# Benchmark harness
BENCH_WARMUPS = int(os.getenv('BENCH_WARMUPS', '3'))
BENCH_REPETITIONS = int(os.getenv('BENCH_REPETITIONS', '20'))
BENCH_REFERENCE_M = int(os.getenv('BENCH_REFERENCE_M', str(2 ** 20)))
BENCH_REFERENCE_L = float(os.getenv('BENCH_REFERENCE_L', '20.0'))
BENCH_HESTON_REFERENCE_M = int(os.getenv('BENCH_HESTON_REFERENCE_M', str(2 ** 14)))

COSNUFFT_LOG_LEVEL = os.getenv('COSNUFFT_LOG_LEVEL', 'INFO')

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
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': COSNUFFT_LOG_LEVEL,
            'propagate': False,
        }
        for app in ('charfn', 'cosrange', 'cosclassic', 'nufft', 'nufftpricer', 'bench', 'frontend')
    },
}
