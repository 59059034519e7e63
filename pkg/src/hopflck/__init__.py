"""Locally conformal Kaehler geometry of class-1 Hopf surfaces S^1 x S^3:
complex structure, metric families, Lee data, canonical foliations and the
elliptic fibration to CP^1."""

from __future__ import annotations

__version__ = "0.1.0"

from .frame import IRRATIONAL, FramePoint, HopfParams  # noqa: E402
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig  # noqa: E402

__all__ = ["DEFAULT_TOLERANCES", "IRRATIONAL", "FramePoint", "HopfParams", "ToleranceConfig", "__version__"]
