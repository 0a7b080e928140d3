from django.apps import AppConfig


class CosclassicConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cosclassic'
    verbose_name = 'Classic COS pricer'
