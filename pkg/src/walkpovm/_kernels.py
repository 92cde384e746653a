"""Hot loops of the walk: per-site coin multiplication, conditional shift, Born weights.

The fused ``coin_shift`` kernel is one full step.

Amplitude fields are ``(n_sites, 2)`` complex128 arrays, column 0 = H, column 1 = V.
Each kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version.  The numba path is used when numba imports and the environment
variable ``WALKPOVM_DISABLE_NUMBA`` is unset (or ``0``).
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "KERNELS", "get_kernels", "numba_available"]


# ---- pure numpy ---------------------------------------------------------

def _apply_site_coins_np(amps, coins):
    return np.einsum("xij,xj->xi", coins, amps)


def _shift_np(amps):
    n = amps.shape[0]
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    out[2:, 0] = amps[:, 0]
    out[:n, 1] = amps[:, 1]
    return out


def _shift_inverse_np(amps):
    n = amps.shape[0]
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    out[:n, 0] = amps[:, 0]
    out[2:, 1] = amps[:, 1]
    return out


def _coin_shift_np(amps, coins):
    return _shift_np(_apply_site_coins_np(amps, coins))


def _site_weights_np(amps):
    return np.sum(amps.real ** 2 + amps.imag ** 2, axis=1)


_NUMPY = {
    "apply_site_coins": _apply_site_coins_np,
    "shift": _shift_np,
    "shift_inverse": _shift_inverse_np,
    "site_weights": _site_weights_np,
    "coin_shift": _coin_shift_np,
}


# ---- numba ----------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def apply_site_coins(amps, coins):
        n = amps.shape[0]
        out = np.empty_like(amps)
        for x in range(n):
            h = amps[x, 0]
            v = amps[x, 1]
            out[x, 0] = coins[x, 0, 0] * h + coins[x, 0, 1] * v
            out[x, 1] = coins[x, 1, 0] * h + coins[x, 1, 1] * v
        return out

    @njit(cache=True)
    def shift(amps):
        n = amps.shape[0]
        out = np.zeros((n + 2, 2), dtype=np.complex128)
        for x in range(n):
            out[x + 2, 0] = amps[x, 0]
            out[x, 1] = amps[x, 1]
        return out

    @njit(cache=True)
    def shift_inverse(amps):
        n = amps.shape[0]
        out = np.zeros((n + 2, 2), dtype=np.complex128)
        for x in range(n):
            out[x, 0] = amps[x, 0]
            out[x + 2, 1] = amps[x, 1]
        return out

    @njit(cache=True)
    def coin_shift(amps, coins):
        n = amps.shape[0]
        out = np.zeros((n + 2, 2), dtype=np.complex128)
        for x in range(n):
            h = amps[x, 0]
            v = amps[x, 1]
            out[x + 2, 0] = coins[x, 0, 0] * h + coins[x, 0, 1] * v
            out[x, 1] = coins[x, 1, 0] * h + coins[x, 1, 1] * v
        return out

    @njit(cache=True)
    def site_weights(amps):
        n = amps.shape[0]
        out = np.empty(n, dtype=np.float64)
        for x in range(n):
            h = amps[x, 0]
            v = amps[x, 1]
            out[x] = h.real * h.real + h.imag * h.imag + v.real * v.real + v.imag * v.imag
        return out

    return {
        "apply_site_coins": apply_site_coins,
        "shift": shift,
        "shift_inverse": shift_inverse,
        "site_weights": site_weights,
        "coin_shift": coin_shift,
    }


try:
    _NUMBA = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    _NUMBA = None


def numba_available() -> bool:
    return _NUMBA is not None


def get_kernels(backend: str) -> dict:
    """Return the kernel table for ``"numba"`` or ``"numpy"``."""
    if backend == "numpy":
        return _NUMPY
    if backend == "numba":
        if _NUMBA is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _NUMBA
    raise ValueError(f"unknown backend {backend!r}")


def _select_backend() -> str:
    flag = os.environ.get("WALKPOVM_DISABLE_NUMBA", "").strip().lower()
    if flag not in ("", "0", "false", "no") or _NUMBA is None:
        return "numpy"
    return "numba"


BACKEND = _select_backend()
KERNELS = get_kernels(BACKEND)
