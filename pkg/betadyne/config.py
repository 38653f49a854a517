#!/usr/bin/env python3
"""
Configuration for betadyne
Centralized numerical tolerances and environment-driven runtime settings
"""

import os
from typing import Any, Dict

from dotenv import load_dotenv

load_dotenv()


class BetadyneConfig:
    """Centralized configuration and tolerance record"""

    # Structural tolerances
    STRUCTURAL_TOL = 1e-10
    SPECTRAL_TOL = 1e-8
    HERMITIAN_TOL = 1e-10
    UNITARY_TOL = 1e-10

    # Exceptional-point search
    # Eigenvalue gaps open as the square root of the distance to an EP, so
    # double precision floors the coalescence measure near 1e-8.
    EP_SEARCH_TOL = 1e-6
    MULTISTART_POINTS = 9
    NELDER_MEAD_MAXITER = 4000

    # Jump sampling
    JUMP_PROBABILITY_WARN = 0.05
    JUMP_PROBABILITY_MAX = 0.5

    # Dense storage only
    MAX_DIM = 16

    # Runtime
    LOG_LEVEL = os.getenv("BETADYNE_LOG_LEVEL", "INFO")
    BATCH_SIZE = int(os.getenv("BETADYNE_BATCH_SIZE", "1000"))
    DEFAULT_SEED = int(os.getenv("BETADYNE_SEED", "20240101"))

    @classmethod
    def threads(cls) -> int:
        """Worker count, BETADYNE_THREADS overrides machine parallelism"""
        value = os.getenv("BETADYNE_THREADS")
        if value:
            return max(1, int(value))
        return os.cpu_count() or 1

    @classmethod
    def describe(cls) -> Dict[str, Any]:
        """Settings snapshot recorded in output manifests"""
        return {
            "structural_tol": cls.STRUCTURAL_TOL,
            "spectral_tol": cls.SPECTRAL_TOL,
            "hermitian_tol": cls.HERMITIAN_TOL,
            "unitary_tol": cls.UNITARY_TOL,
            "ep_search_tol": cls.EP_SEARCH_TOL,
            "multistart_points": cls.MULTISTART_POINTS,
            "jump_probability_warn": cls.JUMP_PROBABILITY_WARN,
            "jump_probability_max": cls.JUMP_PROBABILITY_MAX,
            "batch_size": cls.BATCH_SIZE,
        }
