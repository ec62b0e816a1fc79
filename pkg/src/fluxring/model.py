"""Ring model definition: hoppings with phases, potentials, interaction, gauge moves.

A model lives on the ring {1, .., L} (site L+1 == site 1). Bond x connects
sites x and x+1 and carries a hopping amplitude |t_x| * exp(i theta_x).
Only the total phase around the ring (the flux) is gauge invariant; the
per-bond distribution is a gauge choice.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BadLength,
    FluxMismatch,
    HardCoreOverfill,
    MixedInteraction,
    ModelError,
    RingTooSmall,
    ZeroHopping,
)

TWO_PI = 2.0 * math.pi

#: Sentinel for the hard-core (projected) interaction.
INFINITY = float("inf")

#: Tolerance for angle comparisons mod 2*pi.
ANGLE_TOL = 1e-12


def fold_angle(theta: float) -> float:
    """Fold an angle into [0, 2*pi)."""
    out = math.fmod(float(theta), TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:  # fmod can land exactly on 2*pi after the correction
        out -= TWO_PI
    return out


def angle_dist(a: float, b: float) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    d = fold_angle(a - b)
    return min(d, TWO_PI - d)


def angles_equal(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return angle_dist(a, b) <= tol


@dataclass(frozen=True)
class ModelSpec:
    """Immutable Hubbard-ring model.

    Fields
    ------
    L        : ring length (>= 3)
    N        : particle number (0 <= N <= 2L, <= L in hard-core mode)
    hop_mag  : length-L positive hopping magnitudes |t_x|
    hop_phase: length-L bond phases theta_x in [0, 2*pi)
    V        : length-L on-site potentials
    U        : length-L on-site couplings, or the scalar INFINITY for the
               hard-core (no double occupancy) mode
    """

    L: int
    N: int
    hop_mag: tuple[float, ...]
    hop_phase: tuple[float, ...]
    V: tuple[float, ...]
    U: tuple[float, ...] | float

    @property
    def hardcore(self) -> bool:
        return not isinstance(self.U, tuple)

    @property
    def flux(self) -> float:
        """Total phase around the ring, folded into [0, 2*pi)."""
        return fold_angle(math.fsum(self.hop_phase))

    def amplitudes(self) -> np.ndarray:
        """Complex bond amplitudes t_x = |t_x| exp(i theta_x)."""
        return np.asarray(self.hop_mag) * np.exp(1j * np.asarray(self.hop_phase))

    def u_values(self) -> np.ndarray:
        if self.hardcore:
            raise MixedInteraction("hard-core model has no finite U values")
        return np.asarray(self.U, dtype=float)


@dataclass(frozen=True)
class GaugeAssignment:
    """A length-L redistribution of bond phases with a fixed total."""

    phases: tuple[float, ...]

    @property
    def flux(self) -> float:
        return fold_angle(math.fsum(self.phases))


def make_spec(L, N, hop_mag=None, hop_phase=None, V=None, U=0.0) -> ModelSpec:
    """Build and validate a ModelSpec; scalars are broadcast to length L.

    ``U=INFINITY`` (or any list of all-infinite entries) selects hard-core mode.
    """

    def _broadcast(val, default):
        if val is None:
            val = default
        if isinstance(val, (int, float)):
            return tuple(float(val) for _ in range(L))
        return tuple(float(v) for v in val)

    mags = _broadcast(hop_mag, 1.0)
    phases = _broadcast(hop_phase, 0.0)
    pots = _broadcast(V, 0.0)
    if isinstance(U, (int, float)) and math.isinf(U):
        u: tuple[float, ...] | float = INFINITY
    else:
        u = _broadcast(U, 0.0)
    return validate(ModelSpec(int(L), int(N), mags, phases, pots, u))


def validate(raw: ModelSpec) -> ModelSpec:
    """Check invariants and return the normalized spec (phases folded)."""
    if raw.L < 3:
        raise RingTooSmall(f"L={raw.L}: need L >= 3")
    for name, seq in (("hop_mag", raw.hop_mag), ("hop_phase", raw.hop_phase), ("V", raw.V)):
        if len(seq) != raw.L:
            raise BadLength(f"{name} has length {len(seq)}, expected L={raw.L}")
    if any(m <= 0.0 for m in raw.hop_mag):
        raise ZeroHopping("every |t_x| must be strictly positive")

    u = raw.U
    if isinstance(u, tuple):
        if len(u) != raw.L:
            raise BadLength(f"U has length {len(u)}, expected L={raw.L}")
        infs = [math.isinf(v) for v in u]
        if all(infs) and infs:
            u = INFINITY
        elif any(infs):
            raise MixedInteraction("per-site U mixes finite and infinite entries")
    elif not math.isinf(u):
        raise ModelError("scalar U must be INFINITY; use a list for finite couplings")

    hardcore = not isinstance(u, tuple)
    if raw.N < 0 or raw.N > 2 * raw.L:
        raise ModelError(f"N={raw.N} outside [0, 2L]")
    if hardcore and raw.N > raw.L:
        raise HardCoreOverfill(f"N={raw.N} > L={raw.L} with hard-core interaction")

    phases = tuple(fold_angle(p) for p in raw.hop_phase)
    return replace(raw, hop_phase=phases, U=u)


def regauge(spec: ModelSpec, target: GaugeAssignment) -> ModelSpec:
    """Redistribute bond phases without changing the flux.

    Raises FluxMismatch when the target phases do not sum to the model flux
    mod 2*pi (tolerance ANGLE_TOL). Spectra are invariant under this move.
    """
    if len(target.phases) != spec.L:
        raise BadLength(f"gauge has {len(target.phases)} phases, expected {spec.L}")
    if not angles_equal(target.flux, spec.flux):
        raise FluxMismatch(
            f"gauge sums to {target.flux:.15g}, model flux is {spec.flux:.15g}"
        )
    return validate(replace(spec, hop_phase=tuple(target.phases)))


def canonical_gauge(spec: ModelSpec) -> ModelSpec:
    """Move the whole flux onto the last bond: theta = (0, .., 0, flux)."""
    phases = (0.0,) * (spec.L - 1) + (spec.flux,)
    return replace(spec, hop_phase=phases)


def with_flux(spec: ModelSpec, phi: float) -> ModelSpec:
    """Same ring, retuned to total flux phi (canonical gauge)."""
    phases = (0.0,) * (spec.L - 1) + (fold_angle(phi),)
    return replace(spec, hop_phase=phases)


def to_dict(spec: ModelSpec) -> dict:
    u: object
    if spec.hardcore:
        u = "inf"
    else:
        u = list(spec.U)
    return {
        "L": spec.L,
        "N": spec.N,
        "hop": [{"mag": m, "theta": p} for m, p in zip(spec.hop_mag, spec.hop_phase)],
        "V": list(spec.V),
        "U": u,
    }


def from_dict(data: dict) -> ModelSpec:
    L = int(data["L"])
    hop = data["hop"]
    mags = [h["mag"] for h in hop]
    phases = [h["theta"] for h in hop]
    u = data.get("U", 0.0)
    if isinstance(u, str):
        if u.lower() != "inf":
            raise ModelError(f"unrecognized U value {u!r}")
        u = INFINITY
    return make_spec(L, int(data["N"]), mags, phases, data.get("V", 0.0), u)


def dumps_model(spec: ModelSpec) -> str:
    return json.dumps(to_dict(spec), indent=2) + "\n"


def load_model(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def save_model(spec: ModelSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(spec))


def parse_angle(text: str) -> float:
    """Parse an angle given in radians or as a rational multiple of pi.

    Accepts plain floats ("1.5707"), "pi", "3pi", "1/2pi", "3/2 pi".
    """
    s = text.strip().lower().replace(" ", "")
    if "pi" not in s:
        return float(s)
    head = s[: s.index("pi")]
    if s[s.index("pi") + 2 :]:
        raise ValueError(f"cannot parse angle {text!r}")
    if not head or head in "+-":
        num = float(head + "1")
    elif "/" in head:
        p, q = head.split("/")
        num = float(p) / float(q)
    else:
        num = float(head)
    return num * math.pi


def format_angle(phi: float) -> str:
    """Render simple rational multiples of pi symbolically, else as a float."""
    frac = fold_angle(phi) / math.pi
    for q in (1, 2, 3, 4, 6):
        p = frac * q
        if abs(p - round(p)) < 1e-9:
            p = int(round(p))
            if p == 0:
                return "0"
            if q == 1:
                return "pi" if p == 1 else f"{p}pi"
            return f"{p}/{q}pi" if p != 1 else f"1/{q}pi"
    return f"{cmath.pi * frac / math.pi:.12g}"
