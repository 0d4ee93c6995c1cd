"""byline: rule-based author name disambiguation and portfolio validation."""

__version__ = "0.1.0"
