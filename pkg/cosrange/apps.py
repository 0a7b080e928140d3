from django.apps import AppConfig


class CosrangeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cosrange'
    verbose_name = 'Truncation range and payoff coefficients'
