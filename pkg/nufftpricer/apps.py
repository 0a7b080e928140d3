from django.apps import AppConfig


class NufftpricerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nufftpricer'
    verbose_name = 'NUFFT COS pricer'
