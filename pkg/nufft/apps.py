from django.apps import AppConfig


class NufftConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nufft'
    verbose_name = 'Type-2 non-uniform FFT'
