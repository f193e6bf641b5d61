"""Mathieu characteristic values and normalised periodic Mathieu functions.

The equation y'' + (mu - 2 q cos 2 eta) y = 0 has a 2 pi periodic solution
exactly when mu equals a characteristic value a_m(q) (even solution ce_m)
or b_m(q) (odd solution se_m).  Expanding in Fourier series splits the
problem into four symmetry classes, each governed by a symmetric
tridiagonal recurrence matrix:

    ce, even order:  harmonics cos(2k eta),      diag (0, 4, 16, ...),
                     off-diagonal (sqrt(2) q, q, q, ...)
    ce, odd order:   harmonics cos((2k+1) eta),  diag (1+q, 9, 25, ...), off-diag q
    se, odd order:   harmonics sin((2k+1) eta),  diag (1-q, 9, 25, ...), off-diag q
    se, even order:  harmonics sin((2k+2) eta),  diag (4, 16, 36, ...),  off-diag q

The sqrt(2) on the first ce-even coupling symmetrises the recurrence (the
constant harmonic carries twice the L2 weight of the others); with it, the
i-th smallest eigenvalue of each class matrix is the characteristic value
of the i-th order in that class, and a unit-norm eigenvector yields
coefficients normalised so that

    integral_{-pi}^{pi} |ce_m|^2 = integral_{-pi}^{pi} |se_m|^2 = pi.

Truncation starts at 64 rows and doubles until every requested value is
stable to 1e-13; failure to stabilise raises ``NumericalError``.  The sign
convention fixes the first non-vanishing Fourier coefficient positive.
Results are cached per (kind, order, q) and immutable, so concurrent use is
safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, NumericalError
from .linalg import TridiagonalSymmetric, eig_tridiagonal, eig_tridiagonal_full

__all__ = ["MathieuChar", "char_values", "char_value", "fourier_coefficients", "evaluate"]

_BASE_TRUNCATION = 64
_MAX_TRUNCATION = 8192
_STABILITY_TOL = 1e-13
_COEFF_CUTOFF = 1e-16


@dataclass(frozen=True)
class MathieuChar:
    """One characteristic value, optionally with its Fourier expansion.

    ``harmonics`` lists the integer frequencies of the expansion (stride 2
    within one symmetry class) and ``fourier`` the matching coefficients:
    ce_m(eta) = sum_j fourier[j] * cos(harmonics[j] * eta), se_m with sin.
    Both are None when only the value was requested.
    """

    kind: str
    m: int
    q: float
    value: float
    harmonics: np.ndarray | None = None
    fourier: np.ndarray | None = None


def _validate(kind: str, m: int) -> None:
    if kind not in ("ce", "se"):
        raise InputError(f"kind must be 'ce' or 'se', got {kind!r}")
    if kind == "ce" and m < 0:
        raise InputError(f"ce order must be >= 0, got {m}")
    if kind == "se" and m < 1:
        raise InputError(f"se order must be >= 1, got {m}")


def _first_harmonic(kind: str, parity: int) -> int:
    if kind == "ce":
        return parity  # 0 or 1
    return 1 if parity == 1 else 2


def _recurrence(kind: str, parity: int, q: float, size: int) -> TridiagonalSymmetric:
    start = _first_harmonic(kind, parity)
    harmonics = start + 2.0 * np.arange(size)
    diag = harmonics**2
    off = np.full(size - 1, q)
    if kind == "ce" and parity == 1:
        diag[0] = 1.0 + q
    elif kind == "se" and parity == 1:
        diag[0] = 1.0 - q
    elif kind == "ce" and parity == 0:
        off[0] = np.sqrt(2.0) * q
    return TridiagonalSymmetric(diagonal=diag, offdiagonal=off)


@lru_cache(maxsize=None)
def _stable_class_values(kind: str, parity: int, q: float, count: int):
    """First ``count`` class eigenvalues at a truncation stable under doubling.

    Returns (values, size) where ``size`` is the accepted truncation.
    """
    size = max(_BASE_TRUNCATION, count + 16)
    prev = eig_tridiagonal(_recurrence(kind, parity, q, size), count)
    while size <= _MAX_TRUNCATION:
        size *= 2
        cur = eig_tridiagonal(_recurrence(kind, parity, q, size), count)
        if np.all(np.abs(cur - prev) <= _STABILITY_TOL * np.maximum(1.0, np.abs(cur))):
            return cur, size
        prev = cur
    raise NumericalError(
        f"Mathieu class ({kind}, parity {parity}) at q={q} did not stabilise "
        f"below truncation {_MAX_TRUNCATION}"
    )


def _class_index(m: int, kind: str) -> int:
    # position of order m inside its symmetry class
    if kind == "ce":
        return m // 2
    return (m - 1) // 2 if m % 2 == 1 else m // 2 - 1


def char_value(kind: str, m: int, q: float) -> float:
    """Single characteristic value a_m(q) (kind 'ce') or b_m(q) (kind 'se')."""
    _validate(kind, m)
    idx = _class_index(m, kind)
    values, _ = _stable_class_values(kind, m % 2, float(q), idx + 1)
    return float(values[idx])


def char_values(q: float, max_order: int) -> list[MathieuChar]:
    """All characteristic values a_0..a_max and b_1..b_max at parameter q.

    Values only (no Fourier data); ordered ce first then se, each by order.
    """
    if max_order < 0:
        raise InputError(f"max_order must be >= 0, got {max_order}")
    q = float(q)
    out = []
    for kind in ("ce", "se"):
        lowest = 0 if kind == "ce" else 1
        for parity in (0, 1):
            orders = [
                m for m in range(lowest, max_order + 1) if m % 2 == parity
            ]
            if not orders:
                continue
            count = _class_index(orders[-1], kind) + 1
            values, _ = _stable_class_values(kind, parity, q, count)
            for m in orders:
                out.append(
                    MathieuChar(kind=kind, m=m, q=q, value=float(values[_class_index(m, kind)]))
                )
    out.sort(key=lambda ch: (ch.kind, ch.m))
    return out


@lru_cache(maxsize=None)
def fourier_coefficients(kind: str, m: int, q: float) -> MathieuChar:
    """Characteristic value plus normalised Fourier coefficients of ce_m/se_m.

    The recurrence eigenvector is normalised to unit length (which realises
    the sqrt(pi) function normalisation), its overall sign is fixed by a
    positive first non-vanishing coefficient, and for the ce-even class the
    constant-harmonic coefficient is rescaled by 1/sqrt(2) back to function
    space.  Trailing coefficients below 1e-16 are dropped.
    """
    _validate(kind, m)
    q = float(q)
    parity = m % 2
    idx = _class_index(m, kind)
    _, size = _stable_class_values(kind, parity, q, idx + 1)
    decomp = eig_tridiagonal_full(_recurrence(kind, parity, q, size))
    value = float(decomp.eigenvalues[idx])
    y = decomp.eigenvectors[:, idx].copy()
    y /= np.linalg.norm(y)
    nonzero = np.nonzero(np.abs(y) > _COEFF_CUTOFF)[0]
    if nonzero.size and y[nonzero[0]] < 0.0:
        y = -y
    coeff = y.copy()
    if kind == "ce" and parity == 0:
        coeff[0] /= np.sqrt(2.0)
    keep = np.nonzero(np.abs(coeff) >= _COEFF_CUTOFF)[0]
    last = keep[-1] + 1 if keep.size else 1
    harmonics = _first_harmonic(kind, parity) + 2 * np.arange(last)
    return MathieuChar(
        kind=kind,
        m=m,
        q=q,
        value=value,
        harmonics=harmonics,
        fourier=coeff[:last].copy(),
    )


def evaluate(kind: str, m: int, q: float, eta, derivative: int = 0):
    """Pointwise ce_m(eta, q) or se_m(eta, q), or an eta derivative of it.

    Sums the Fourier series; 2 pi periodic, ce even and se odd in eta,
    pi periodic for even order and pi antiperiodic for odd order.
    """
    if derivative not in (0, 1, 2):
        raise InputError(f"derivative must be 0, 1 or 2, got {derivative}")
    ch = fourier_coefficients(kind, m, float(q))
    eta = np.asarray(eta, dtype=float)
    j = ch.harmonics[:, None]
    coeff = ch.fourier[:, None]
    phase = j * eta.reshape(1, -1)
    if kind == "ce":
        if derivative == 0:
            table = coeff * np.cos(phase)
        elif derivative == 1:
            table = -coeff * j * np.sin(phase)
        else:
            table = -coeff * j * j * np.cos(phase)
    else:
        if derivative == 0:
            table = coeff * np.sin(phase)
        elif derivative == 1:
            table = coeff * j * np.cos(phase)
        else:
            table = -coeff * j * j * np.sin(phase)
    result = table.sum(axis=0).reshape(eta.shape)
    return result if result.shape else float(result)
