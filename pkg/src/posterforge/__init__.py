"""Turn a research paper PDF into an editable poster, and score posters."""

__version__ = "0.1.0"
