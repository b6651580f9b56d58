"""
Progress tracking for long numerical scans.

Landscape grids, Jacobian assembly and epsilon sweeps report through the
package logger. Grids can hold thousands of points, so intermediate lines
are throttled to fixed percentage steps.
"""

import time

from .logger import logger


class ProgressTracker:
    """
    Step counter that logs at every `step_percent` of completion.

    Attributes:
        total: Number of work items
        current: Items finished so far
        description: Label used in log lines
    """

    def __init__(self, total: int, description: str = "Processing", step_percent: float = 10.0) -> None:
        """
        Args:
            total: Total number of items to process
            description: Description of the operation being tracked
            step_percent: Percentage between two intermediate log lines

        Raises:
            ValidationError: If total is negative or step_percent is not in (0, 100]
        """
        from .exceptions import ValidationError

        if total < 0:
            raise ValidationError("Total must be non-negative", "total", "non-negative integer")
        if not 0.0 < step_percent <= 100.0:
            raise ValidationError("step_percent must lie in (0, 100]", "step_percent", "percentage")

        self.total = total
        self.current = 0
        self.description = description
        self.step_percent = step_percent
        self._next_report = step_percent
        self._start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._start

    def update(self, n: int = 1) -> None:
        """
        Advance by n items.

        Raises:
            ValidationError: If n is negative
        """
        from .exceptions import ValidationError

        if n < 0:
            raise ValidationError("Progress increment must be non-negative", "n", "non-negative integer")

        if self.current + n > self.total:
            logger.warning(f"⚠️ WARN: {self.description} overran its total: {self.current + n} > {self.total}")
            n = self.total - self.current

        self.current += n
        percentage = (self.current / self.total * 100) if self.total > 0 else 100.0
        if percentage >= self._next_report:
            logger.info(f"{self.description}: {self.current}/{self.total} ({percentage:.0f}%, {self.elapsed:.1f}s)")
            while self._next_report <= percentage:
                self._next_report += self.step_percent

    def finish(self) -> None:
        """Log the completion line with the wall time."""
        logger.info(f"✅ {self.description} completed: {self.current}/{self.total} in {self.elapsed:.2f}s")


__all__ = ["ProgressTracker"]
