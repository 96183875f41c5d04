from django.apps import AppConfig


class NoebelingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'noebeling'
    verbose_name = 'Noebeling curve paths'
