"""Desk-scale calculator for deformed current-algebra kernels.

Exact truncated h-adic series arithmetic on the rational curve
configuration, synthesis and verification of the deformed cubic-relation
coefficients, the functional shuffle model of the positive current half,
residue Hopf pairings with Gram analysis, and degree-truncated canonical
tensors.
"""

__version__ = "0.1.0"
