from django.apps import AppConfig


class ExtraConfig(AppConfig):
    name = "expmap.extra"
