"""Point-variety incidences in R^d with polynomial partitioning.

Subpackages: ``algebra`` (exact arithmetic), ``partition`` (ham-sandwich
cells), ``incidence`` (counting and axiom checks); modules ``varieties``,
``generators``, ``analysis`` and ``cli``.
"""
__version__ = "0.1.0"
