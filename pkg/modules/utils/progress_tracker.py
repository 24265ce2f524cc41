"""
Progress Tracker Module
Tracks per-file progress of corpus analysis and forwards updates to listeners
"""
import logging
import threading
import time
from typing import Callable, Optional, Dict, Any, List
from dataclasses import dataclass, replace

logger = logging.getLogger(__name__)


@dataclass
class ProgressState:
    """Progress state information"""
    current: int = 0
    total: int = 0
    message: str = ""
    stage: str = ""
    percentage: float = 0.0
    failed: int = 0
    is_complete: bool = False


class ProgressTracker:
    """Tracks and manages progress for long-running corpus analyses"""

    def __init__(self):
        self.state = ProgressState()
        self.callbacks: List[Callable[[ProgressState], None]] = []
        self.lock = threading.Lock()
        self.start_time: Optional[float] = None
        self.is_active = False

    def register_callback(self, callback: Callable[[ProgressState], None]) -> None:
        """
        Register callback to receive progress updates

        Args:
            callback: Function that accepts ProgressState
        """
        with self.lock:
            if callback not in self.callbacks:
                self.callbacks.append(callback)

    def start(self, total_items: int, message: str = "Starting...", stage: str = "analyze") -> None:
        """
        Start progress tracking

        Args:
            total_items: Total number of files to process
            message: Initial status message
            stage: Current processing stage
        """
        with self.lock:
            self.state = ProgressState(total=total_items, message=message, stage=stage)
            self.start_time = time.monotonic()
            self.is_active = True

        self._notify_callbacks()

    def increment(self, message: str = None, failed: bool = False) -> None:
        """
        Record one processed file

        Args:
            message: Status message (usually the file name)
            failed: Whether the file was excluded from the analysis
        """
        with self.lock:
            if not self.is_active:
                return
            self.state.current = min(self.state.current + 1, self.state.total)
            self.state.percentage = (self.state.current / self.state.total) * 100 if self.state.total > 0 else 0.0
            if failed:
                self.state.failed += 1
            if message:
                self.state.message = message

        self._notify_callbacks()

    def complete(self, message: str = "Complete") -> None:
        """Mark progress as complete"""
        with self.lock:
            self.state.current = self.state.total
            self.state.percentage = 100.0
            self.state.message = message
            self.state.is_complete = True
            self.is_active = False

        self._notify_callbacks()

    def get_state(self) -> ProgressState:
        """Get current progress state (thread-safe copy)"""
        with self.lock:
            return replace(self.state)

    def get_elapsed_time(self) -> Optional[float]:
        """Get elapsed time since progress started"""
        if self.start_time is not None:
            return time.monotonic() - self.start_time
        return None

    def get_formatted_status(self) -> Dict[str, Any]:
        """Get formatted status information"""
        state = self.get_state()
        elapsed = self.get_elapsed_time()

        return {
            'percentage': f"{state.percentage:.1f}%",
            'progress_text': f"{state.current}/{state.total}",
            'failed': state.failed,
            'message': state.message,
            'stage': state.stage,
            'elapsed_time': f"{elapsed:.1f}s" if elapsed else "0s",
        }

    def _notify_callbacks(self) -> None:
        state_copy = self.get_state()
        for callback in list(self.callbacks):
            try:
                callback(state_copy)
            except Exception as e:
                logger.error(f"Error in progress callback: {e}")
