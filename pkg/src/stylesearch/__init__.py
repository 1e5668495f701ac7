"""stylesearch: visual product search and classification over a fashion catalog."""

__version__ = "0.1.0"
