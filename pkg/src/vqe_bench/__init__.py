"""Desk-scale benchmarking of variational quantum eigensolver configurations."""

__version__ = "0.1.0"

from importlib import resources as _resources


def data_path(name: str) -> str:
    """Filesystem path of a bundled data file such as ``"h2_sto3g.fcidump"``."""
    return str(_resources.files(__name__) / "data" / name)
