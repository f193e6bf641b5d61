"""Closed-form spectra and eigenfunctions of the flat and effective models.

Both models live on the rescaled rectangle Pi = (0, 2 pi R) x (-1, 1) with
Dirichlet walls at u = +/-1 and the twisted seam psi(0, u) = psi(2 pi R, -u).

Flat ("fake") model, pure Laplacian: eigenvalues

    lambda_{m,n} = (m / 2R)^2 + (n pi / 2a)^2,   m in Z, n >= 1, m + n odd,

with real separable eigenfunctions.  The longitudinal factor is
(2 pi R)^(-1/2) for m = 0 and (pi R)^(-1/2) cos(m s / 2R) or
(pi R)^(-1/2) sin(|m| s / 2R) for m != 0; a negative mode index m labels
the sine partner of the degenerate +/-|m| pair.  The transverse factor is
cos(n pi u / 2) for odd n and sin(n pi u / 2) for even n.  Both real
combinations satisfy the twisted seam conditions exactly when m + n is odd,
and they make every projection matrix downstream real symmetric.

Effective model, Laplacian plus the geometric potential
-cos(s/R) / (8 R^2): separation in s yields the Mathieu equation at
parameter q = -1/4, so

    lambda = (1/2R)^2 a_m(q) + (n pi / 2a)^2   (family eff_ce, m >= 0)
    lambda = (1/2R)^2 b_m(q) + (n pi / 2a)^2   (family eff_se, m >= 1)

again under m + n odd, with longitudinal factors
(pi R)^(-1/2) ce_m(s/2R, q) and (pi R)^(-1/2) se_m(s/2R, q).  At q = 0
these degenerate exactly onto the flat model (ce_m -> cos, se_m -> sin),
which fixes the correspondence between the signed flat index and the
ce/se families; ``effective_spectrum`` keeps q overridable so that
degeneration is testable.

Eigenvalues are returned merged into multiplicity-aware entries: values
within 1e-9 relative collapse into one entry (the near-identical ce/se
pairs at large order must merge, physically split pairs stay apart), with
a deterministic lexicographic mode order inside each entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mathieu
from .errors import InputError
from .geometry import StripParams

__all__ = [
    "FAMILY_FAKE",
    "FAMILY_EFF_CE",
    "FAMILY_EFF_SE",
    "ModeIndex",
    "SpectrumEntry",
    "Spectrum",
    "fake_spectrum",
    "effective_spectrum",
    "fake_eigenfunction",
    "effective_eigenfunction",
    "transverse_profile",
    "fake_longitudinal",
    "effective_longitudinal",
]

FAMILY_FAKE = "fake"
FAMILY_EFF_CE = "eff_ce"
FAMILY_EFF_SE = "eff_se"

MERGE_RTOL = 1e-9
DEFAULT_Q = -0.25


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Label (family, m, n) of one closed-form eigenfunction.

    family 'fake' admits any integer m (negative = sine partner); 'eff_ce'
    needs m >= 0 and 'eff_se' m >= 1.  n >= 1 is the transverse index and
    m + n must be odd (the twisted seam kills the even-sum combinations).
    """

    family: str
    m: int
    n: int

    def __post_init__(self):
        if self.family not in (FAMILY_FAKE, FAMILY_EFF_CE, FAMILY_EFF_SE):
            raise InputError(f"unknown mode family {self.family!r}")
        if self.n < 1:
            raise InputError(f"transverse index must be >= 1, got n={self.n}")
        if self.family == FAMILY_EFF_CE and self.m < 0:
            raise InputError(f"eff_ce requires m >= 0, got m={self.m}")
        if self.family == FAMILY_EFF_SE and self.m < 1:
            raise InputError(f"eff_se requires m >= 1, got m={self.m}")
        if (self.m + self.n) % 2 == 0:
            raise InputError(
                f"mode ({self.family}, m={self.m}, n={self.n}) violates the "
                f"parity selection rule: m + n must be odd"
            )

    @property
    def harmonic(self) -> int:
        return abs(self.m)


@dataclass(frozen=True)
class SpectrumEntry:
    """One merged eigenvalue with every mode label sharing it.

    Members keep their exact per-mode eigenvalues in ``mode_values`` (the
    near-identical large-order pairs differ below any printable tolerance,
    but the sub-merge-tolerance splitting is physical and the convergence
    studies track it); ``value`` is the lowest member.  Modes are ordered
    by exact value, lexicographic (family, m, n) on ties.
    """

    value: float
    modes: tuple[ModeIndex, ...]
    mode_values: tuple[float, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.modes)


@dataclass(frozen=True)
class Spectrum:
    """Ascending merged eigenvalues of one model at fixed parameters."""

    params: StripParams
    model: str
    entries: tuple[SpectrumEntry, ...] = field(default_factory=tuple)

    def values(self, count: int | None = None) -> np.ndarray:
        """Exact eigenvalues flattened with multiplicity, lowest first."""
        flat = [v for e in self.entries for v in e.mode_values]
        return np.array(flat if count is None else flat[:count])

    def modes_flat(self, count: int | None = None) -> list[ModeIndex]:
        flat = [m for e in self.entries for m in e.modes]
        return flat if count is None else flat[:count]

    def flattened(self, count: int | None = None):
        """(exact value, mode, entry multiplicity) triples with multiplicity."""
        flat = [
            (v, m, e.multiplicity)
            for e in self.entries
            for v, m in zip(e.mode_values, e.modes)
        ]
        return flat if count is None else flat[:count]


def _entry(group) -> SpectrumEntry:
    pairs = sorted(group)
    return SpectrumEntry(
        value=pairs[0][0],
        modes=tuple(m for _, m in pairs),
        mode_values=tuple(v for v, _ in pairs),
    )


def _merge(candidates, params: StripParams, model: str, count: int) -> Spectrum:
    """Sort (value, modes) candidates, merge near-equal values, trim to count."""
    candidates.sort(key=lambda c: (c[0], c[1]))
    entries = []
    total = 0
    anchor = None
    group: list[tuple[float, ModeIndex]] = []
    for value, modes in candidates:
        if anchor is not None and abs(value - anchor) <= MERGE_RTOL * max(
            abs(anchor), abs(value)
        ):
            group.extend((value, m) for m in modes)
            continue
        if anchor is not None:
            entries.append(_entry(group))
            total += len(group)
            if total >= count:
                break
        anchor = value
        group = [(value, m) for m in modes]
    else:
        if anchor is not None and total < count:
            entries.append(_entry(group))
            total += len(group)
    if total < count:
        raise InputError(
            f"internal enumeration produced only {total} of {count} eigenvalues"
        )
    return Spectrum(params=params, model=model, entries=tuple(entries))


def fake_spectrum(params: StripParams, count: int) -> Spectrum:
    """The ``count`` smallest flat-model eigenvalues with multiplicities.

    Enumeration is exhaustive: a value cap is doubled until the candidate
    box (all m, n with lambda <= cap) holds at least ``count`` eigenvalues
    counted with multiplicity, so nothing below the returned maximum can be
    missed.
    """
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}")
    R = params.R
    e1 = params.transverse_energy
    cap = 8.0 * e1
    while True:
        candidates = []
        total = 0
        n = 1
        while e1 * n * n <= cap:
            tn = e1 * n * n
            m = 1 if n % 2 == 0 else 0
            while (m / (2.0 * R)) ** 2 + tn <= cap:
                value = (m / (2.0 * R)) ** 2 + tn
                if m == 0:
                    candidates.append((value, (ModeIndex(FAMILY_FAKE, 0, n),)))
                    total += 1
                else:
                    candidates.append(
                        (
                            value,
                            (
                                ModeIndex(FAMILY_FAKE, -m, n),
                                ModeIndex(FAMILY_FAKE, m, n),
                            ),
                        )
                    )
                    total += 2
                m += 2
            n += 1
        if total >= count + 8:
            return _merge(candidates, params, "fake", count)
        cap *= 2.0


def effective_spectrum(params: StripParams, count: int, q: float = DEFAULT_Q) -> Spectrum:
    """The ``count`` smallest effective-model eigenvalues with multiplicities.

    The order sweep is bounded by the Weyl estimate
    a_m(q), b_m(q) >= m^2 - 3|q| (the recurrence matrix is its diagonal
    plus an off-diagonal perturbation of norm below 3|q|), so every order
    that could fall under the value cap is visited.  The cap starts at a
    longitudinal budget sized for ``count`` and doubles on shortfall; it
    deliberately does not scale with the transverse energy, which at small
    half-width would drag absurdly high Mathieu orders into the sweep.
    """
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}")
    e1 = params.transverse_energy
    kappa = 1.0 / (2.0 * params.R) ** 2
    budget = kappa * (count + 16.0) ** 2 + 3.0 * abs(q) * kappa
    while True:
        cap = e1 + budget
        m_max = int(np.ceil(np.sqrt(budget / kappa + 3.0 * abs(q)))) + 1
        chars = {
            (ch.kind, ch.m): ch.value for ch in mathieu.char_values(q, m_max)
        }
        candidates = []
        total = 0
        for (kind, m), mu in chars.items():
            family = FAMILY_EFF_CE if kind == "ce" else FAMILY_EFF_SE
            n = 1 if m % 2 == 0 else 2  # m + n odd
            while kappa * mu + e1 * n * n <= cap:
                candidates.append(
                    (kappa * mu + e1 * n * n, (ModeIndex(family, m, n),))
                )
                total += 1
                n += 2
        if total >= count + 8:
            return _merge(candidates, params, "effective", count)
        budget *= 2.0


def transverse_profile(n: int, u, derivative: int = 0):
    """Dirichlet transverse factor on (-1, 1): cos(n pi u/2) odd n, sin even n."""
    u = np.asarray(u, dtype=float)
    halfwave = 0.5 * n * np.pi
    phase = halfwave * u
    if n % 2 == 1:
        if derivative == 0:
            return np.cos(phase)
        if derivative == 1:
            return -halfwave * np.sin(phase)
        return -(halfwave**2) * np.cos(phase)
    if derivative == 0:
        return np.sin(phase)
    if derivative == 1:
        return halfwave * np.cos(phase)
    return -(halfwave**2) * np.sin(phase)


def fake_longitudinal(m: int, params: StripParams, s, derivative: int = 0):
    """Unit-norm flat longitudinal factor on (0, 2 pi R); m < 0 is the sine branch."""
    s = np.asarray(s, dtype=float)
    R = params.R
    if m == 0:
        value = 1.0 / np.sqrt(2.0 * np.pi * R)
        return np.full(s.shape, value if derivative == 0 else 0.0)
    k = abs(m)
    rate = k / (2.0 * R)
    amp = 1.0 / np.sqrt(np.pi * R)
    phase = rate * s
    if m > 0:
        if derivative == 0:
            return amp * np.cos(phase)
        if derivative == 1:
            return -amp * rate * np.sin(phase)
        return -amp * rate**2 * np.cos(phase)
    if derivative == 0:
        return amp * np.sin(phase)
    if derivative == 1:
        return amp * rate * np.cos(phase)
    return -amp * rate**2 * np.sin(phase)


def effective_longitudinal(mode: ModeIndex, params: StripParams, s, q: float = DEFAULT_Q):
    """Unit-norm Mathieu longitudinal factor (pi R)^(-1/2) ce/se(s/2R, q)."""
    kind = "ce" if mode.family == FAMILY_EFF_CE else "se"
    s = np.asarray(s, dtype=float)
    eta = s / (2.0 * params.R)
    return mathieu.evaluate(kind, mode.m, q, eta) / np.sqrt(np.pi * params.R)


def fake_eigenfunction(mode: ModeIndex, params: StripParams):
    """Evaluable unit-norm flat eigenfunction on Pi.

    Returns a callable psi(s, u) that broadcasts over arrays and satisfies
    the twisted seam rule psi(0, u) = psi(2 pi R, -u) exactly.
    """
    if mode.family != FAMILY_FAKE:
        raise InputError(f"expected a fake-family mode, got {mode.family!r}")

    def psi(s, u):
        return fake_longitudinal(mode.m, params, s) * transverse_profile(mode.n, u)

    return psi


def effective_eigenfunction(mode: ModeIndex, params: StripParams, q: float = DEFAULT_Q):
    """Evaluable unit-norm effective eigenfunction on Pi.

    The longitudinal part solves -phi'' + potential_veff * phi = nu phi with
    nu = a_m(q) / (4 R^2) (ce family) or b_m(q) / (4 R^2) (se family).
    """
    if mode.family not in (FAMILY_EFF_CE, FAMILY_EFF_SE):
        raise InputError(f"expected an effective-family mode, got {mode.family!r}")

    def psi(s, u):
        return effective_longitudinal(mode, params, s, q) * transverse_profile(mode.n, u)

    return psi
