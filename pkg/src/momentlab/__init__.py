"""Order and type of indeterminate moment problems with polynomial rates.

The package computes interleaved nested sums with a prefix-sum dynamic
program, assembles truncated Nevanlinna matrices, and estimates the order
and type of the resulting entire functions from their Taylor coefficients.
"""

__version__ = "0.1.0"
