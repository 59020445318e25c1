from django.apps import AppConfig


class CprtConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cprt'
    verbose_name = 'Compositional Privacy Risk Taxonomy'
