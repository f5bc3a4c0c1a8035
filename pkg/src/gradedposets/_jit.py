"""Switchable JIT: ``GRADEDPOSETS_DISABLE_JIT=1`` runs kernels as plain Python."""
from __future__ import annotations

import os

JIT_ENABLED = os.environ.get("GRADEDPOSETS_DISABLE_JIT", "") not in ("1", "true", "yes")

if JIT_ENABLED:
    from numba import njit
else:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper
