"""simcleaner: semi-automated standardization of string columns in tabular data.

Clusters similar values of a column into a canonical dictionary using
character-based similarity, routes borderline merges to a human review
queue, and applies the validated dictionary back onto the table with a
full audit trail.
"""

from simcleaner.errors import SimCleanerError

__version__ = "0.1.0"

__all__ = ["SimCleanerError", "__version__"]
