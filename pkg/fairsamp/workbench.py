import importlib
import logging
import pkgutil
from typing import Dict

from fairsamp.handlers.base import BaseHandler

logger = logging.getLogger(__name__)


def discover_handlers() -> Dict[str, BaseHandler]:
    """Instantiate every BaseHandler subclass found in fairsamp.handlers, keyed by command name."""
    handlers = {}
    import fairsamp.handlers as handlers_pkg
    for finder, name, ispkg in pkgutil.iter_modules(handlers_pkg.__path__):
        if name.startswith('_') or name == 'base':
            continue
        mod = importlib.import_module(f'fairsamp.handlers.{name}')
        # find classes inheriting BaseHandler
        for attr in dir(mod):
            obj = getattr(mod, attr)
            if isinstance(obj, type) and issubclass(obj, BaseHandler) and obj is not BaseHandler \
                    and obj.__module__ == mod.__name__:
                inst = obj()
                handlers[inst.name] = inst
    logger.debug(f'Registered handlers: {sorted(handlers)}')
    return dict(sorted(handlers.items()))
