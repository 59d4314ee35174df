"""driftscope: weekly word usage and meaning change over a time-bucketed corpus."""

__version__ = "0.1.0"
