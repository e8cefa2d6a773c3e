"""
Per-feature debug logging.

Flags come from the ``debug`` section of config.json; ``--debug`` turns the
master switch and every flag on. Each flag logs through its own child of
``rang.debug`` (``rang.debug.arff`` ...), so a single feature can also be
filtered at the handler level.

    from app.services.debug import debug_log, is_debug_enabled

    debug_log('ARFF', 'bisection s=%.5f count=%d', s, count)
    if is_debug_enabled('TRAIN'):
        ...
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

FLAG_DEFINITIONS = {
    'SAMPLING': 'Node generation (FF front, samplers)',
    'ARFF': 'Error standardization and bisection search',
    'TRAIN': 'Training loop, losses, resampling',
    'SUITE': 'Replicate scheduling and aggregation',
    'AUTODIFF': 'Jet and gradient checks',
}

_logger = logging.getLogger('rang.debug')


@dataclass
class _DebugState:
    enabled: bool = False
    flags: dict[str, bool] = field(default_factory=lambda: dict.fromkeys(FLAG_DEFINITIONS, False))

    def active(self, flag: str) -> bool:
        return self.enabled and self.flags.get(flag, False)


_state = _DebugState()


def load_debug_flags(config: Optional[dict]) -> None:
    """Apply the ``debug`` section of an already-parsed config; unknown flags are reported and ignored."""
    section = (config or {}).get('debug') or {}
    if not section:
        return
    _state.enabled = bool(section.get('enabled', False))
    for name, value in (section.get('flags') or {}).items():
        key = str(name).upper()
        if key not in FLAG_DEFINITIONS:
            _logger.warning('Unknown debug flag %r in config (known: %s)', name, ', '.join(FLAG_DEFINITIONS))
            continue
        _state.flags[key] = bool(value)


def set_debug_enabled(enabled: bool) -> None:
    _state.enabled = enabled


def set_all_debug_flags(enabled: bool) -> None:
    _state.flags = dict.fromkeys(FLAG_DEFINITIONS, enabled)


def get_debug_state() -> dict:
    return {'enabled': _state.enabled, 'flags': dict(_state.flags)}


def is_debug_enabled(flag: str) -> bool:
    return _state.active(flag)


def debug_log(flag: str, message: str, *args: Any) -> None:
    """Formatting is deferred to the logger, so a disabled flag costs one dict lookup."""
    if _state.active(flag):
        _logger.getChild(flag.lower()).info(f'[{flag}] {message}', *args)
