"""Line-oriented run log: `ISO8601 <runId> <agent> <level> <message>`."""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from typing import Callable, Optional


class RunLog:
    def __init__(self, run_id: str, sink: Optional[Callable[[str], None]] = None):
        self.run_id = run_id
        self.lines: list[str] = []
        self._sink = sink
        self._lock = threading.Lock()

    def log(self, agent: str, level: str, message: str) -> None:
        stamp = datetime.now(timezone.utc).isoformat()
        line = f"{stamp} {self.run_id} {agent} {level} {message}"
        with self._lock:
            self.lines.append(line)
        if self._sink is not None:
            self._sink(line)

    def info(self, agent: str, message: str) -> None:
        self.log(agent, "INFO", message)

    def warning(self, agent: str, message: str) -> None:
        self.log(agent, "WARN", message)

    def since(self, index: int) -> tuple[list[str], int]:
        """Lines from `index` on, plus the cursor for the next poll."""
        with self._lock:
            snapshot = self.lines[max(0, index):]
            return snapshot, len(self.lines)
