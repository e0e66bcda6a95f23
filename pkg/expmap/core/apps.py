import logging

from django.apps import AppConfig
from django.conf import settings

logger = logging.getLogger(__name__)


class CoreAppConfig(AppConfig):
    name = "expmap.core"

    def ready(self):
        from expmap.core.config import get_config

        logger.debug("expmap %s with %s", settings.EXPMAP_VERSION, get_config())
