"""
Graceful shutdown handling for long-running table and sweep commands.

SIGTERM and SIGINT set a flag instead of killing the process, so a run can
finish the cell it is computing, skip the rest, close its output streams and
record a `cancelled` manifest.
"""

import logging
import signal
from pathlib import Path
from typing import Callable, List, Optional, Union


class GracefulShutdownHandler:
    """
    Handles graceful shutdown signals for long-running processes.

    Usage:
        shutdown_handler = GracefulShutdownHandler()
        shutdown_handler.register_cleanup(streams.close_all_streams)
        shutdown_handler.start_listening()

        for cell in cells:
            if shutdown_handler.should_shutdown:
                break
            compute(cell)

        shutdown_handler.cleanup()
    """

    def __init__(self, logger_name: Optional[str] = None):
        self.should_shutdown = False
        self.cleanup_functions: List[Callable[[], None]] = []
        self.logger = logging.getLogger(logger_name or __name__)
        self._previous_handlers = {}

    def register_cleanup(self, cleanup_func: Callable[[], None]) -> None:
        """
        Register a cleanup function to be called on shutdown.

        Args:
            cleanup_func: Function to call during cleanup
        """
        self.cleanup_functions.append(cleanup_func)
        self.logger.debug(f"Registered cleanup function: {getattr(cleanup_func, '__name__', cleanup_func)}")

    def _signal_handler(self, signum: int, frame) -> None:
        signal_name = signal.Signals(signum).name
        self.logger.info(f"Received {signal_name} signal, finishing the current cell and stopping...")
        self.should_shutdown = True

    def request_shutdown(self) -> None:
        """Set the shutdown flag without a signal."""
        self.should_shutdown = True

    def start_listening(self) -> None:
        """Start listening for shutdown signals."""
        for signum in (signal.SIGTERM, signal.SIGINT):
            self._previous_handlers[signum] = signal.signal(signum, self._signal_handler)
        self.logger.debug("Graceful shutdown handler activated (SIGTERM, SIGINT)")

    def stop_listening(self) -> None:
        """Restore the handlers that were active before start_listening."""
        for signum, previous in self._previous_handlers.items():
            signal.signal(signum, previous)
        self._previous_handlers.clear()

    def cleanup(self) -> None:
        """Execute all registered cleanup functions in registration order."""
        for i, cleanup_func in enumerate(self.cleanup_functions, 1):
            name = getattr(cleanup_func, '__name__', repr(cleanup_func))
            try:
                self.logger.debug(f"Executing cleanup function {i}/{len(self.cleanup_functions)}: {name}")
                cleanup_func()
            except Exception as e:
                self.logger.error(f"Error in cleanup function {name}: {e}")
        self.cleanup_functions.clear()
        self.stop_listening()


class OutputStreamManager:
    """
    Tracks opened output files and closes them on shutdown.

    Usage:
        streams = OutputStreamManager(shutdown_handler)
        handle = streams.open(path)
        # write rows...
        # handle is closed by shutdown_handler.cleanup()
    """

    def __init__(self, shutdown_handler: GracefulShutdownHandler, logger_name: Optional[str] = None):
        self.shutdown_handler = shutdown_handler
        self.streams = []
        self.logger = logging.getLogger(logger_name or __name__)
        self.shutdown_handler.register_cleanup(self.close_all_streams)

    def add_stream(self, stream) -> None:
        self.streams.append(stream)
        self.logger.debug(f"Added output stream to manager (total: {len(self.streams)})")

    def open(self, path: Union[str, Path], mode: str = "w"):
        """Open a UTF-8 text file with '\\n' line endings and track it."""
        handle = open(path, mode, encoding="utf-8", newline="")
        self.add_stream(handle)
        return handle

    def close_all_streams(self) -> None:
        """Close all managed streams."""
        for i, stream in enumerate(self.streams, 1):
            try:
                if hasattr(stream, 'close'):
                    stream.close()
                else:
                    self.logger.warning(f"Stream {i} does not have close() method")
            except Exception as e:
                self.logger.error(f"Error closing stream {i}: {e}")
        self.logger.debug(f"Closed {len(self.streams)} output streams")
        self.streams.clear()
