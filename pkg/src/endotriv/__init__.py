"""endotriv: exact computation of trivial-source endo-trivial module classes."""

__version__ = "0.1.0"
