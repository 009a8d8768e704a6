"""Kernel backend selection.

The hot inner loops (graph growth, diffusion cycle phases, SIR sweeps) exist
twice: a Cython extension (``_cykernels``) and a numpy/pure-Python fallback
(``_pykernels``). Both implement the exact same draw protocol and floating
point expressions, so a run is bit-identical regardless of backend; only
speed differs. The compiled backend is preferred when importable.

Set ``RUMORNET_BACKEND=python`` (or ``compiled``) to force a choice, or pass
``backend=`` to the public entry points.
"""

from __future__ import annotations

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}

try:
    from . import _cykernels

    _BACKENDS["compiled"] = _cykernels
except ImportError:  # extension not built; fall back silently
    _cykernels = None

_ALIASES = {
    "py": "python",
    "python": "python",
    "c": "compiled",
    "cy": "compiled",
    "compiled": "compiled",
}


def get_backend(name: str | None = None):
    """Resolve a backend module by name, env var, or availability."""
    if name is None:
        name = os.environ.get("RUMORNET_BACKEND")
    if name is None:
        return _BACKENDS.get("compiled", _pykernels)
    key = _ALIASES.get(name.lower())
    if key is None:
        raise ValueError(f"unknown backend {name!r}; use 'compiled' or 'python'")
    if key not in _BACKENDS:
        raise RuntimeError("compiled backend requested but the extension is not built")
    return _BACKENDS[key]


def backend_name(module=None) -> str:
    module = module if module is not None else get_backend()
    return "compiled" if module is _BACKENDS.get("compiled") else "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)
