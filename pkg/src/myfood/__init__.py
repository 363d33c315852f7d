"""Food segmentation evaluation and nutritional monitoring toolkit."""

__version__ = "0.1.0"
