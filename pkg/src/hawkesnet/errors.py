"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "HawkesNetError",
    "InvalidInputError",
    "UnsupportedKernelError",
    "DegenerateModelError",
    "SimulationExplosionError",
    "UnderGenerationWarning",
]


class HawkesNetError(Exception):
    """Base class for package errors."""


class InvalidInputError(HawkesNetError, ValueError):
    """Malformed data, graphs, parameters, or configuration."""


class UnsupportedKernelError(HawkesNetError, ValueError):
    """Operation requested for a kernel family it does not support."""


class DegenerateModelError(HawkesNetError):
    """Model assigns zero intensity where events were observed."""


class SimulationExplosionError(HawkesNetError):
    """Per-bin expected count exceeded the supercriticality guard."""

    def __init__(self, bin_index: int, expected_count: float, guard: float):
        self.bin_index = bin_index
        self.expected_count = expected_count
        self.guard = guard
        super().__init__(
            f"expected count {expected_count:.3g} in bin {bin_index} exceeds "
            f"guard {guard:.3g}; the process is exploding"
        )


class UnderGenerationWarning(UserWarning):
    """Benchmark generation hit the bin cap before the target event count."""
