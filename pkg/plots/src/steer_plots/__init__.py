"""Read experiment CSVs and render paper-style figures.

Pure readers: input files are never modified, and the figures are
deterministic for fixed inputs (fixed axes, no timestamps).
"""

__version__ = "0.1.0"
