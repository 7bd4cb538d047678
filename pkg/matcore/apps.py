from django.apps import AppConfig


class MatcoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'matcore'
    verbose_name = 'Dense Hermitian linear algebra'
