"""Check factory: every `Check` subclass in `wcport.checks` under its CHECK_KEY."""

import importlib
import inspect
import pkgutil
from typing import Dict, List, Optional, Type

from wcport.console import warn
from wcport.interfaces import Check


def discover_checks(package_name: str = "wcport.checks") -> Dict[str, Type[Check]]:
    pkg = importlib.import_module(package_name)
    checks: Dict[str, Type[Check]] = {}
    for _finder, name, ispkg in pkgutil.iter_modules(pkg.__path__):
        if ispkg:
            continue
        try:
            mod = importlib.import_module(f"{package_name}.{name}")
        except Exception as e:
            warn(f"Warning: failed to import check module {package_name}.{name}: {e}")
            continue
        for _, obj in inspect.getmembers(mod, inspect.isclass):
            if issubclass(obj, Check) and obj is not Check:
                checks[getattr(obj, "CHECK_KEY", None) or name] = obj
    return checks


_CHECKS: Optional[Dict[str, Type[Check]]] = None


def _registry() -> Dict[str, Type[Check]]:
    global _CHECKS
    if _CHECKS is None:
        _CHECKS = discover_checks()
    return _CHECKS


def list_checks() -> List[str]:
    return sorted(_registry().keys())


def get_check(key: str) -> Check:
    cls = _registry().get(key)
    if not cls:
        raise KeyError(f"Unknown check '{key}'. Available: {', '.join(list_checks())}")
    return cls()
