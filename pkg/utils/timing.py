from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator

from zeta_engine.errors import StageError, ZetaError

logger = logging.getLogger(__name__)


class StageTimer:
    """Wall-clock milliseconds per pipeline stage; failures come out as ``StageError``."""

    def __init__(self) -> None:
        self.timings_ms: Dict[str, float] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        logger.info("stage %s: start", name)
        try:
            yield
        except StageError:
            raise
        except ZetaError as exc:
            logger.info("stage %s failed: %s", name, exc)
            raise StageError(name, exc) from exc
        finally:
            elapsed = (time.perf_counter() - start) * 1000.0
            self.timings_ms[name] = self.timings_ms.get(name, 0.0) + round(elapsed, 3)
        logger.info("stage %s: %.1f ms", name, self.timings_ms[name])

    def total_ms(self) -> float:
        return round(sum(self.timings_ms.values()), 3)
