"""
betadyne: tunable non-Hermitian unravelings of Lindblad dynamics.

Builds open-system models, applies the beta-dyne transform, locates
exceptional points of the postselected effective Hamiltonians and checks by
Monte Carlo trajectories that every unraveling averages to the same master
equation.
"""

__version__ = "1.0.0"
