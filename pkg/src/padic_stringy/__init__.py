"""Exact verification of p-adic integration identities on finite abelian quotient stacks."""

__version__ = "0.1.0"
