"""Install-relative paths. Config, logs and reference data resolve from the install root."""

from __future__ import annotations

import os

_APP_DIR = os.path.dirname(os.path.abspath(__file__))
_DEFAULT_INSTALL_ROOT = os.path.dirname(_APP_DIR)
_install_root: str | None = None


def resolve_install_root() -> str:
    """Return the install directory (parent of ``app/``)."""
    global _install_root
    if _install_root is not None:
        return _install_root
    override = os.environ.get("RANG_INSTALL_DIR", "").strip()
    if override:
        _install_root = os.path.abspath(override)
    else:
        _install_root = _DEFAULT_INSTALL_ROOT
    return _install_root


def default_data_dir() -> str:
    return os.path.join(resolve_install_root(), "data")


def default_config_path() -> str:
    """``RANG_CONFIG`` wins over the install-root ``config.json``."""
    override = os.environ.get("RANG_CONFIG", "").strip()
    if override:
        return os.path.abspath(override)
    return os.path.join(resolve_install_root(), "config.json")


def reference_dir() -> str:
    """Directory holding the Allen–Cahn / Schrödinger reference grids."""
    return os.path.join(default_data_dir(), "reference")


def default_results_dir() -> str:
    return os.path.join(resolve_install_root(), "results")


def logs_dir() -> str:
    return os.path.join(resolve_install_root(), "logs")


def crash_log_path() -> str:
    return os.path.join(logs_dir(), "crash.log")
