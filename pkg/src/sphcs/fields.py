"""Test coefficient sets: random sparse draws, a directive-speaker analog,
probe response constants and their product Wigner coefficients.

The speaker analog replaces measured loudspeaker data, which is not shipped.
It has an axisymmetric core whose m = 0 spherical-wave coefficients decay
geometrically in n, plus a random m != 0 part whose share of the squared l2
norm is set exactly. Presets C1-C3 use the asymmetry shares 0.45 %, 1.05 % and
2.22 %; the suffix a/b/c selects the probe (ideal, first-order perturbation,
first and second-order perturbation).
"""
from dataclasses import dataclass, field

import numpy as np

from .grid import _rng
from .transform import WignerCoefficients
from .wigner import spherical_hankel1_orders, wigner_d

__all__ = [
    "SpeakerModel",
    "ProbeResponse",
    "PRESETS",
    "SPEED_OF_SOUND",
    "wavenumber",
    "random_sparse_coefficients",
    "speaker_analog",
    "probe_response",
    "compose",
    "rotate_coefficients",
    "preset",
]

SPEED_OF_SOUND = 343.0
R_AB = 0.75
PROBE_FREQUENCY = 1098.0


def wavenumber(freq_hz, c=SPEED_OF_SOUND):
    return 2 * np.pi * freq_hz / c


@dataclass
class SpeakerModel:
    """Spherical-wave coefficients A_n^m stored as ``values[n, m + n_max]``."""

    n_max: int
    values: np.ndarray
    frequency: float = float("nan")
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.n_max + 1, 2 * self.n_max + 1):
            raise ValueError("values must have shape (n_max + 1, 2 n_max + 1)")
        n = np.arange(self.n_max + 1)[:, None]
        m = np.arange(-self.n_max, self.n_max + 1)[None, :]
        if np.any(self.values[np.abs(m) > n] != 0):
            raise ValueError("nonzero coefficient with |m| > n")

    def __getitem__(self, nm):
        n, m = nm
        return self.values[n, m + self.n_max]

    def norm(self):
        return float(np.linalg.norm(self.values))

    @property
    def asymmetry_fraction(self):
        total = np.sum(np.abs(self.values) ** 2)
        axial = np.sum(np.abs(self.values[:, self.n_max]) ** 2)
        return float((total - axial) / total) if total else 0.0

    def normalized(self):
        nrm = self.norm()
        return SpeakerModel(self.n_max, self.values / nrm if nrm else self.values.copy(), self.frequency, self.label)

    def truncate(self, n_max):
        out = np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex)
        k = min(n_max, self.n_max)
        out[:k + 1, n_max - k:n_max + k + 1] = self.values[:k + 1, self.n_max - k:self.n_max + k + 1]
        return SpeakerModel(n_max, out, self.frequency, self.label)


@dataclass
class ProbeResponse:
    """Response constants C_n^mu stored as ``values[n, mu + n_max]``."""

    n_max: int
    values: np.ndarray
    case: str = "a"
    meta: dict = field(default_factory=dict)

    def __getitem__(self, nmu):
        n, mu = nmu
        return self.values[n, mu + self.n_max]

    @property
    def nonzero_count(self):
        return int(np.count_nonzero(self.values))

    @property
    def mu_support(self):
        return sorted(int(k) - self.n_max for k in np.flatnonzero(np.any(self.values != 0, axis=0)))


def random_sparse_coefficients(n_max, s_D, seed=None, mu_zero_only=True, random_phase=False):
    """``s_D`` distinct admissible coefficients set to 1 (or to random unit phases)."""
    a = WignerCoefficients(n_max)
    n = np.arange(n_max + 1)[:, None, None]
    k = np.arange(-n_max, n_max + 1)
    ok = (np.abs(k)[None, :, None] <= n) & (np.abs(k)[None, None, :] <= n)
    if mu_zero_only:
        ok &= (k == 0)[None, None, :]
    slots = np.flatnonzero(ok)
    if not 1 <= s_D <= len(slots):
        raise ValueError(f"s_D must lie in [1, {len(slots)}], got {s_D}")
    rng = _rng(seed)
    pick = rng.choice(slots, size=s_D, replace=False)
    vals = np.exp(2j * np.pi * rng.random(s_D)) if random_phase else np.ones(s_D)
    a.values.flat[pick] = vals
    return a


def speaker_analog(n_max, asymmetry_fraction, decay_rate=None, seed=None, azimuthal_decay=0.5,
                   frequency=float("nan"), label=""):
    """Synthetic directive source with an exact m != 0 energy share.

    m = 0 entries have modulus ``decay_rate**n`` and random phase;
    m != 0 entries are complex Gaussian draws shaped by
    ``decay_rate**n * azimuthal_decay**(|m| - 1)``. The default decay rate
    makes the m = 0 envelope fall 60 dB between n = 0 and n = n_max.
    """
    if not 0 <= asymmetry_fraction < 1:
        raise ValueError("asymmetry_fraction must lie in [0, 1)")
    if decay_rate is None:
        decay_rate = 10.0 ** (-3.0 / max(n_max, 1))
    rng = _rng(seed)
    vals = np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex)
    n = np.arange(n_max + 1)
    vals[:, n_max] = decay_rate**n * np.exp(2j * np.pi * rng.random(n_max + 1))
    axial = vals[:, n_max].copy()
    vals[:, n_max] = axial / np.linalg.norm(axial) * np.sqrt(1 - asymmetry_fraction)
    if asymmetry_fraction > 0 and n_max > 0:
        mm = np.arange(-n_max, n_max + 1)[None, :]
        nn = n[:, None]
        mask = (np.abs(mm) <= nn) & (mm != 0)
        env = decay_rate**nn * azimuthal_decay ** (np.abs(mm) - 1.0)
        draw = rng.standard_normal(vals.shape) + 1j * rng.standard_normal(vals.shape)
        asym = np.where(mask, env * draw, 0)
        vals += asym / np.linalg.norm(asym) * np.sqrt(asymmetry_fraction)
    return SpeakerModel(n_max, vals, frequency, label).normalized()


def probe_response(case, n_max, k=None, r_ab=R_AB, seed=None):
    """Response constants for probe case 'a' (ideal), 'b' or 'c'.

    Case a: C_n^0 = sqrt(2n + 1) / (4 pi) h_n(k r_ab), zero elsewhere.
    Case b adds mu = +-1 constants with real and imaginary parts drawn from
    N(0, (0.01 max_n |C_n^0|)**2); case c adds mu = +-2 at 0.001. The
    second argument of N(0, .) is read as a standard deviation.
    """
    case = case.lower()
    if case not in ("a", "b", "c"):
        raise ValueError(f"unknown probe case {case!r}")
    if k is None:
        k = wavenumber(PROBE_FREQUENCY)
    if k <= 0 or r_ab <= 0:
        raise ValueError("k and r_ab must be positive")
    n = np.arange(n_max + 1)
    c0 = np.sqrt(2 * n + 1) / (4 * np.pi) * spherical_hankel1_orders(n_max, k * r_ab)
    vals = np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex)
    vals[:, n_max] = c0
    peak = np.max(np.abs(c0))
    rng = _rng(seed)
    levels = {"a": [], "b": [(1, 0.01)], "c": [(1, 0.01), (2, 0.001)]}[case]
    for mu, rel in levels:
        sd = rel * peak
        for sgn in (-1, 1):
            # one real and one imaginary draw per (n, mu)
            draw = rng.normal(0.0, sd, size=(n_max + 1, 2))
            col = (draw[:, 0] + 1j * draw[:, 1]) * (n >= mu)
            if mu <= n_max:
                vals[:, n_max + sgn * mu] = col
    return ProbeResponse(n_max, vals, case, {"k": k, "r_ab": r_ab})


def compose(speaker, probe):
    """Wigner coefficients a_n^{m mu} = A_n^m C_n^mu."""
    if speaker.n_max != probe.n_max:
        raise ValueError("band-limit mismatch between speaker and probe")
    n_max = speaker.n_max
    vals = speaker.values[:, :, None] * probe.values[:, None, :]
    n = np.arange(n_max + 1)[:, None, None]
    k = np.arange(-n_max, n_max + 1)
    vals[(np.abs(k)[None, :, None] > n) | (np.abs(k)[None, None, :] > n)] = 0
    return WignerCoefficients(n_max, vals)


def rotation_block(n, alpha, beta, gamma):
    """Matrix D_n[mu + n, m + n] = D_n^{mu m}(alpha, beta, gamma)."""
    k = np.arange(-n, n + 1)
    d = np.array([[wigner_d(n, mu, m, beta) for m in k] for mu in k])
    return np.exp(-1j * k * alpha)[:, None] * d * np.exp(-1j * k * gamma)[None, :]


def rotate_coefficients(speaker, alpha, beta, gamma):
    """Apply D_n(alpha, beta, gamma) to every order-n block of A."""
    n_max = speaker.n_max
    out = np.zeros_like(speaker.values)
    for n in range(n_max + 1):
        sl = slice(n_max - n, n_max + n + 1)
        out[n, sl] = rotation_block(n, alpha, beta, gamma) @ speaker.values[n, sl]
    return SpeakerModel(n_max, out, speaker.frequency, speaker.label)


# name -> (asymmetry share, source frequency in Hz, speaker seed)
SPEAKERS = {
    "C1": (0.0045, 1098.0, 1),
    "C2": (0.0105, 1400.0, 2),
    "C3": (0.0222, 1895.0, 3),
}
PRESETS = tuple(f"{s}{c}" for s in SPEAKERS for c in "abc")


def preset(name, n_max=15, probe_seed=0, **speaker_kw):
    """Speaker, probe and composed Wigner coefficients for a named preset."""
    name = name.upper()
    if len(name) != 3 or name[:2] not in SPEAKERS or name[2] not in "ABC":
        raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    frac, freq, seed = SPEAKERS[name[:2]]
    spk = speaker_analog(n_max, frac, seed=seed, frequency=freq, label=name[:2], **speaker_kw)
    probe = probe_response(name[2].lower(), n_max, seed=probe_seed)
    return spk, probe, compose(spk, probe)
