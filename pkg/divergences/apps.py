from django.apps import AppConfig


class DivergencesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'divergences'
    verbose_name = 'Renyi divergences and Hoeffding quantities'
