"""Time-decay kernels for event excitation.

All kernels are causal: ``evaluate(kernel, t)`` is 0 for ``t <= 0``. Only the
exponential family supports the O(1) recursive summary update used by the
feature builder and the fitting path; Gaussian and uniform kernels exist for
generating mismatched data in robustness experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError, UnsupportedKernelError

__all__ = [
    "ExponentialKernel",
    "GaussianKernel",
    "UniformKernel",
    "DecayKernel",
    "evaluate",
    "temporal_summary_step",
    "kernel_from_config",
    "kernel_to_config",
]


@dataclass(frozen=True)
class ExponentialKernel:
    """``exp(-decay * t)`` for ``t > 0``."""

    decay: float

    def __post_init__(self):
        if not (self.decay > 0):
            raise InvalidInputError(f"decay must be positive, got {self.decay}")


@dataclass(frozen=True)
class GaussianKernel:
    """Gaussian bump centered at ``mean``, full-density normalizer.

    The normalizer is that of the untruncated density; mass at ``t <= 0`` is
    cut, not redistributed.
    """

    mean: float
    std: float = 4.0

    def __post_init__(self):
        if not (self.std > 0):
            raise InvalidInputError(f"std must be positive, got {self.std}")


@dataclass(frozen=True)
class UniformKernel:
    """``1/scale`` on the open interval ``(start, start + scale)``."""

    start: float
    scale: float = 4.0

    def __post_init__(self):
        if not (self.scale > 0):
            raise InvalidInputError(f"scale must be positive, got {self.scale}")


DecayKernel = Union[ExponentialKernel, GaussianKernel, UniformKernel]


def evaluate(kernel: DecayKernel, t) -> np.ndarray | float:
    """Evaluate the kernel at time lag(s) ``t``; 0 for ``t <= 0``."""
    arr = np.asarray(t, dtype=float)
    positive = arr > 0
    if isinstance(kernel, ExponentialKernel):
        out = np.where(positive, np.exp(-kernel.decay * np.where(positive, arr, 0.0)), 0.0)
    elif isinstance(kernel, GaussianKernel):
        z = kernel.std * math.sqrt(2.0 * math.pi)
        out = np.where(
            positive,
            np.exp(-((arr - kernel.mean) ** 2) / (2.0 * kernel.std**2)) / z,
            0.0,
        )
    elif isinstance(kernel, UniformKernel):
        inside = positive & (arr > kernel.start) & (arr < kernel.start + kernel.scale)
        out = np.where(inside, 1.0 / kernel.scale, 0.0)
    else:
        raise UnsupportedKernelError(f"unknown kernel {kernel!r}")
    if np.isscalar(t) or arr.ndim == 0:
        return float(out)
    return out


def temporal_summary_step(kernel: DecayKernel, prev, prev_count, dt: float):
    """One step of the exponential summary recursion.

    ``S(t) = exp(-decay*dt) * (S(t-dt) + X(t-dt))`` with ``S(0) = 0``; this is
    exact for the exponential kernel because of its semigroup property and is
    the only kernel the fitting path supports.
    """
    if not isinstance(kernel, ExponentialKernel):
        raise UnsupportedKernelError(
            f"recursive summary update requires an exponential kernel, got {type(kernel).__name__}"
        )
    if not (dt > 0):
        raise InvalidInputError(f"dt must be positive, got {dt}")
    return math.exp(-kernel.decay * dt) * (np.asarray(prev, dtype=float) + prev_count)


_KERNEL_TYPES = {
    "exponential": (ExponentialKernel, ("delta", "decay")),
    "gaussian": (GaussianKernel, ("mean", "std")),
    "uniform": (UniformKernel, ("start", "scale")),
}


def kernel_from_config(config: dict) -> DecayKernel:
    """Build a kernel from a ``{"type": ..., <params>}`` mapping."""
    if "type" not in config:
        raise InvalidInputError("kernel config needs a 'type' field")
    name = str(config["type"]).lower()
    params = {k: v for k, v in config.items() if k != "type"}
    if name == "exponential":
        # accept either spelling of the decay rate
        if "delta" in params:
            params["decay"] = params.pop("delta")
        if set(params) != {"decay"}:
            raise InvalidInputError(f"exponential kernel takes 'delta', got {sorted(params)}")
        return ExponentialKernel(float(params["decay"]))
    if name == "gaussian":
        if not set(params) <= {"mean", "std"} or "mean" not in params:
            raise InvalidInputError(f"gaussian kernel takes 'mean' and 'std', got {sorted(params)}")
        return GaussianKernel(float(params["mean"]), float(params.get("std", 4.0)))
    if name == "uniform":
        if not set(params) <= {"start", "scale"} or "start" not in params:
            raise InvalidInputError(f"uniform kernel takes 'start' and 'scale', got {sorted(params)}")
        return UniformKernel(float(params["start"]), float(params.get("scale", 4.0)))
    raise InvalidInputError(f"unknown kernel type {name!r}")


def kernel_to_config(kernel: DecayKernel) -> dict:
    """Inverse of :func:`kernel_from_config`."""
    if isinstance(kernel, ExponentialKernel):
        return {"type": "exponential", "delta": kernel.decay}
    if isinstance(kernel, GaussianKernel):
        return {"type": "gaussian", "mean": kernel.mean, "std": kernel.std}
    if isinstance(kernel, UniformKernel):
        return {"type": "uniform", "start": kernel.start, "scale": kernel.scale}
    raise UnsupportedKernelError(f"unknown kernel {kernel!r}")
