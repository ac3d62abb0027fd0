"""gplimit: desk-scale numerical laboratory for the dilute Bose gas.

Subpackages cover radial potentials and their scalings, zero-energy
scattering, spectral one-body operators, Gross-Pitaevskii minimization,
few-body exact diagonalization, and two-particle operator-inequality checks,
tied together by a reproducible study harness.
"""

__version__ = "0.1.0"
