from django.apps import AppConfig


class ExponentsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'exponents'
    verbose_name = 'Error exponent bounds'
