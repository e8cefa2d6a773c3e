import logging
import os
from typing import Optional

import torch

from app.config import AppConfig, load_config, parse_app_config
from app.context import RunContext
from app.paths import default_config_path, default_results_dir, reference_dir, resolve_install_root
from app.services.crash_logging import enable_crash_logging
from app.services.debug import load_debug_flags, set_all_debug_flags, set_debug_enabled
from app.services.logging_setup import configure_logging


def bootstrap(
    *,
    debug: bool = False,
    config_path: Optional[str] = None,
    output_dir: Optional[str] = None,
    log_dir: Optional[str] = None,
) -> tuple[RunContext, AppConfig]:
    """Logging, crash log, config and output layout for one CLI invocation."""
    install_root = resolve_install_root()
    configure_logging(debug=debug, log_dir=log_dir)
    logger = logging.getLogger("rang.boot")
    logger.info("Boot: install_root=%s pid=%s", install_root, os.getpid())
    enable_crash_logging()

    config_path = config_path or default_config_path()
    try:
        raw = load_config(config_path)
        config = parse_app_config(raw)
    except Exception as exc:
        logger.error("Boot: config load failed path=%s err=%s", config_path, exc)
        raise

    load_debug_flags(raw)
    if debug:
        set_debug_enabled(True)
        set_all_debug_flags(True)
        logger.info("Boot: debug mode, all debug flags on")

    torch.set_num_threads(max(1, config.training.torch_threads))
    logger.info("Boot: torch %s threads=%d", torch.__version__, torch.get_num_threads())

    ctx = RunContext(
        output_dir=output_dir or default_results_dir(),
        install_dir=install_root,
        config_path=config_path,
    )
    ctx.ensure_dirs()
    logger.info("Boot: RunContext ready output_dir=%s", ctx.output_dir)
    return ctx, config


def resolve_reference_dir(config: AppConfig) -> str:
    return config.reference.directory or reference_dir()
