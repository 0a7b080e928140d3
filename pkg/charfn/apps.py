from django.apps import AppConfig


class CharfnConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'charfn'
    verbose_name = 'Characteristic functions'
