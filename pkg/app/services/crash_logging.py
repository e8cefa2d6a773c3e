"""Fatal-signal tracebacks for long training runs.

A segfault or SIGABRT inside torch dumps every thread stack to
``logs/crash.log``. Each session appends a header line with pid and command.
"""

import faulthandler
import os
import sys
from datetime import datetime
from typing import Optional, TextIO

from app.paths import crash_log_path

_crash_file: Optional[TextIO] = None


def enable_crash_logging(path: Optional[str] = None) -> str:
    global _crash_file
    path = path or crash_log_path()
    if _crash_file is not None:
        return _crash_file.name
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    _crash_file = open(path, "a", encoding="utf-8")
    _crash_file.write(f"--- {datetime.now():%Y-%m-%d %H:%M:%S} pid={os.getpid()} argv={' '.join(sys.argv)}\n")
    _crash_file.flush()
    faulthandler.enable(file=_crash_file, all_threads=True)
    return path


def disable_crash_logging() -> None:
    global _crash_file
    if _crash_file is None:
        return
    faulthandler.disable()
    _crash_file.close()
    _crash_file = None
