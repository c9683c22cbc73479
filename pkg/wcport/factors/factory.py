"""Factor process factory: discover `FactorProcess` implementations.

Every non-package module in `wcport.factors` is imported once, on first use,
and each `FactorProcess` subclass is registered under its `KIND`. Adding a
module with a new subclass makes the factor kind available to simulation.
"""

import importlib
import inspect
import pkgutil
from typing import Dict, List, Optional, Type

from wcport.console import warn
from wcport.interfaces import FactorProcess


def _iter_modules(package_name: str):
    pkg = importlib.import_module(package_name)
    if not hasattr(pkg, "__path__"):
        return
    for _finder, name, ispkg in pkgutil.iter_modules(pkg.__path__):
        if ispkg:
            continue
        yield f"{package_name}.{name}", name


def discover_processes(package_name: str = "wcport.factors") -> Dict[str, Type[FactorProcess]]:
    processes: Dict[str, Type[FactorProcess]] = {}
    for full_mod, short_name in _iter_modules(package_name):
        try:
            mod = importlib.import_module(full_mod)
        except Exception as e:
            warn(f"Warning: failed to import factor module {full_mod}: {e}")
            continue

        for _, obj in inspect.getmembers(mod, inspect.isclass):
            if issubclass(obj, FactorProcess) and obj is not FactorProcess:
                processes[getattr(obj, "KIND", None) or short_name] = obj

    return processes


_PROCESSES: Optional[Dict[str, Type[FactorProcess]]] = None


def _registry() -> Dict[str, Type[FactorProcess]]:
    global _PROCESSES
    if _PROCESSES is None:
        _PROCESSES = discover_processes()
    return _PROCESSES


def list_processes() -> List[str]:
    return list(_registry().keys())


def get_process(dyn, **kwargs) -> FactorProcess:
    """Instantiate the process for a `FactorDynamics`."""
    cls = _registry().get(dyn.kind)
    if not cls:
        raise KeyError(f"Unknown factor kind '{dyn.kind}'. Available: {', '.join(list_processes())}")
    return cls(dyn, **kwargs)
