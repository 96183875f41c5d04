from django.apps import AppConfig


class LaminationsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'laminations'
    verbose_name = 'Train tracks and measure cones'
