"""Link-level simulator and analytics for adaptive-pulse-width OOK on a THz channel."""

__version__ = "0.1.0"
