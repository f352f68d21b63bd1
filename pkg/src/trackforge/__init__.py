"""Aircraft-track processing toolkit with self-scheduled task distribution."""

__version__ = "0.1.0"
