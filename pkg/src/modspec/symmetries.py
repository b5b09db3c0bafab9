"""Galilei boosts, the scaling symmetry, and their closed-form norm factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, make_grid
from .norms import ModulationParams, bracket
from . import conserved

MKDV = "mkdv"
NLS = "nls"


@dataclass(frozen=True)
class BoostSpec:
    """Wave number, evaluation time, and which flow's boost formula to use."""

    k: float
    t: float = 0.0
    equation: str = MKDV

    def __post_init__(self):
        if self.equation not in (MKDV, NLS):
            raise ValueError(f"equation must be '{MKDV}' or '{NLS}'")
        if not (np.isfinite(self.k) and np.isfinite(self.t)):
            raise ValueError("boost parameters must be finite")


def galilei_boost(u: Field, b: BoostSpec) -> Field:
    """Boosted field u^k at time b.t.

    mkdv: u^k(t,x) = exp(-ikx + 2ik^3 t) u(t, x - 3k^2 t)
    nls:  u^k(t,x) = exp(-ikx - ik^2 t) u(t, x + 2kt)

    Spatial shifts wrap periodically (spectral phase).  For k on the
    frequency lattice the modulus of the spectrum shifts exactly,
    |u^k-hat(xi)| = |uhat(xi + k)|; off-lattice k falls back to a phase
    ramp in physical space, whose boundary mismatch aliases at a level
    set by the field's decay toward the box edge.
    """
    g = u.grid
    k, t = b.k, b.t
    if b.equation == MKDV:
        shift = 3.0 * k**2 * t
        phase0 = np.exp(2j * k**3 * t)
    else:
        shift = -2.0 * k * t
        phase0 = np.exp(-1j * k**2 * t)
    m = k / g.dxi
    if abs(m - np.rint(m)) < 1e-9:
        # exact lattice shift of the spectrum by k, then the translation phase
        mi = int(np.rint(m))
        spec = np.zeros(g.n, dtype=complex)
        if mi >= 0:
            spec[: g.n - mi] = u.spectrum[mi:]
        else:
            spec[-mi:] = u.spectrum[: g.n + mi]
        spec = spec * phase0 * np.exp(-1j * (g.xi + k) * shift)
        return Field.from_spectrum(g, spec)
    # off-lattice wave number: translate spectrally, modulate pointwise
    translated = u.spectrum * np.exp(-1j * g.xi * shift)
    vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(translated))) * (
        g.dxi * g.n / np.sqrt(2.0 * np.pi)
    )
    return Field(g, phase0 * np.exp(-1j * k * g.x) * vals)


def boosted_beta2(u: Field, k: float, kappa: float) -> float:
    """Quadratic functional of the boosted field, evaluated without boosting:

    24 kappa^3 * integral |uhat|^2 / ((4k^2 + (xi-k)^2)(16k^2 + (xi-k)^2)) dxi.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return conserved.beta2(u, kappa, shift=k)


def scale_field(f: Field, lam: float, pad: int = 1) -> Field:
    """f_lam(x) = lam^-1 f(x / lam) realized by re-gridding L -> lam L.

    The new grid's samples sit at x' = lam x, so values map exactly and the
    spectrum satisfies fhat_lam(xi) = fhat(lam xi) with no interpolation.

    `pad` (a power of two) widens the new grid to pad * n points at the same
    dual spacing by zero-padding the spectrum.  Large lam compresses the
    spectrum into a window that shrinks like 1/lam; padding restores enough
    resolved bands to take banded norms of the rescaled field.
    """
    if not lam > 0:
        raise ValueError(f"scaling parameter must be positive, got {lam}")
    if pad < 1 or (pad & (pad - 1)) != 0:
        raise ValueError(f"pad must be a power of two >= 1, got {pad}")
    g = f.grid
    g2 = make_grid(g.n * pad, lam * g.length)
    if pad == 1:
        return Field(g2, f.values / lam, f.spectrum.copy() if lam == 1.0 else None)
    spec = np.zeros(g2.n, dtype=complex)
    lo = g2.n // 2 - g.n // 2
    spec[lo: lo + g.n] = f.spectrum
    return Field.from_spectrum(g2, spec)


def scaling_bound_factor(lam: float, mp: ModulationParams) -> float:
    """<lam>^(-min(1/2, 1/p)) * <1/lam>^(s + max(1/2, 1/p))."""
    if not lam > 0:
        raise ValueError(f"scaling parameter must be positive, got {lam}")
    a = min(0.5, 1.0 / mp.p)
    b = mp.s + max(0.5, 1.0 / mp.p)
    return float(bracket(lam) ** (-a) * bracket(1.0 / lam) ** b)


def apriori_exponent(mp: ModulationParams) -> float:
    """Growth exponent c(s, p) of the global norm bound.

    c = p s + p/2 - 1 for p >= 2 and c = 2 s + 2/p - 1 for p <= 2;
    the branches agree at p = 2.
    """
    if not mp.main_range:
        raise ValueError(f"(p, s) = ({mp.p}, {mp.s}) violates s < 3/2 - 1/p")
    if mp.p >= 2.0:
        return mp.p * mp.s + mp.p / 2.0 - 1.0
    return 2.0 * mp.s + 2.0 / mp.p - 1.0
