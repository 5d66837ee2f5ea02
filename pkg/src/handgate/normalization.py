"""Min-max feature normalization with frozen training extrema.

Both the quality-metric vectors and the 104-entry geometry vectors are
rescaled by f' = (f - min) / (max - min), where min/max come from training
data only and are frozen afterwards.  A feature that is constant in
training carries no information; it maps to 0 and a warning is emitted
once at fit time.
"""

from __future__ import annotations

import hashlib
import warnings

import numpy as np

__all__ = ["MinMaxNormalizer"]


class MinMaxNormalizer:
    """Per-feature min-max scaling, extrema frozen at fit time."""

    def __init__(self) -> None:
        self.mins_: np.ndarray | None = None
        self.maxs_: np.ndarray | None = None
        self.constant_: np.ndarray | None = None

    def fit(self, x: np.ndarray) -> "MinMaxNormalizer":
        x = np.asarray(x, np.float64)
        if x.ndim != 2 or len(x) == 0:
            raise ValueError("fit expects a non-empty 2-D feature matrix")
        self.mins_ = x.min(axis=0)
        self.maxs_ = x.max(axis=0)
        self.constant_ = self.maxs_ == self.mins_
        if self.constant_.any():
            idx = np.flatnonzero(self.constant_).tolist()
            warnings.warn(
                f"features {idx} are constant in training; they normalize to 0",
                stacklevel=2,
            )
        return self

    @property
    def fitted(self) -> bool:
        return self.mins_ is not None

    @property
    def version(self) -> str:
        """Stable fingerprint of the frozen extrema, for template files."""
        if not self.fitted:
            raise RuntimeError("normalizer is not fitted")
        digest = hashlib.sha256(
            self.mins_.tobytes() + self.maxs_.tobytes()
        ).hexdigest()
        return digest[:16]

    def apply(self, v: np.ndarray) -> np.ndarray:
        if not self.fitted:
            raise RuntimeError("normalizer must be fitted before apply")
        v = np.asarray(v, np.float64)
        span = np.where(self.constant_, 1.0, self.maxs_ - self.mins_)
        out = (v - self.mins_) / span
        if v.ndim == 1:
            out[self.constant_] = 0.0
        else:
            out[:, self.constant_] = 0.0
        return out

    def to_dict(self) -> dict:
        return {
            "mins": self.mins_.tolist(),
            "maxs": self.maxs_.tolist(),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MinMaxNormalizer":
        norm = cls()
        norm.mins_ = np.asarray(payload["mins"], np.float64)
        norm.maxs_ = np.asarray(payload["maxs"], np.float64)
        norm.constant_ = norm.maxs_ == norm.mins_
        return norm
