"""Hot kernels for truncated-polynomial (jet) coefficient arithmetic.

Two interchangeable backends compute the same convolution:

* ``numba``  -- @njit compiled loop over the precomputed multiplication
  table (default when numba imports cleanly).
* ``numpy``  -- pure-numpy fallback built on np.bincount.

Selection: environment variable ``FINSLER_LAB_BACKEND`` set to ``numba`` or
``numpy``; anything else (or unset) picks numba when available.  Benchmarks
live in benchmarks/bench_kernels.py.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-free installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # signature-compatible no-op decorator
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True, nogil=True)
def _mul_table_njit(a, b, mul_i, mul_j, mul_k, out):  # pragma: no cover - compiled
    for t in range(mul_i.shape[0]):
        out[mul_k[t]] += a[mul_i[t]] * b[mul_j[t]]


def _mul_table_numpy(a, b, mul_i, mul_j, mul_k, out):
    # bincount accumulates duplicate target slots correctly
    out += np.bincount(mul_k, weights=a[mul_i] * b[mul_j], minlength=out.shape[0])


def _pick_backend():
    env = os.environ.get("FINSLER_LAB_BACKEND", "").strip().lower()
    if env == "numpy":
        return "numpy"
    if env == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(
                "FINSLER_LAB_BACKEND=numba requested but numba is not importable"
            )
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


_ACTIVE = _pick_backend()


def active_backend():
    return _ACTIVE


def set_backend(name):
    """Programmatic backend switch (used by benchmarks and equivalence tests)."""
    global _ACTIVE
    name = name.strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    previous = _ACTIVE
    _ACTIVE = name
    return previous


def multiply(a, b, mul_i, mul_j, mul_k, n_terms):
    """Coefficient array of the truncated product of two jets."""
    out = np.zeros(n_terms)
    if _ACTIVE == "numba":
        _mul_table_njit(a, b, mul_i, mul_j, mul_k, out)
    else:
        _mul_table_numpy(a, b, mul_i, mul_j, mul_k, out)
    return out
