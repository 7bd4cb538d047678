from django.apps import AppConfig


class MeansConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'means'
    verbose_name = 'Operator perspectives and geometric means'
