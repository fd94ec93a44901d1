"""Exact F_p and Q(η) computations for M̄_{0,1+p} with its cyclic relabelling action."""

__version__ = "0.1.0"
