"""Numerical extrinsic geometry of spacelike codimension-2 submanifolds."""

__version__ = "0.1.0"
