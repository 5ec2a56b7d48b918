"""Seed-keyed i.i.d. bond capacities, quantized to integer micro-units.

Each bond is hashed independently: a SplitMix64 chain absorbs the master
seed, the bond's lower endpoint and its orientation, and the resulting
64-bit word drives the inverse CDF of the chosen law.  Nothing is stored,
so the field is lazy over the unbounded lattice and identical under any
evaluation order or parallel schedule.

Values are integer micro-units (scale * capacity units, rounded half-up),
because the max-flow = min-cut identity is tested as exact integer
equality downstream.  The scalar accessor funnels through the same
vectorized code path as the grid accessor, so the two can never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from .lattice import Bond, bond_key

MICRO_SCALE = 1 << 20  # micro-units per capacity unit
VALUE_CAP_MICRO = 1 << 32  # hard cap for unbounded laws (overflow safety)

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_DERIVE_TAG = 0xD1B54A32D192ED03

_KINDS = ("const", "bern", "exp", "unif")


def _splitmix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        z = (z + _GAMMA) & _MASK64
        z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK64
        z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK64
        return z ^ (z >> np.uint64(31))


def _to_u64(a: np.ndarray) -> np.ndarray:
    return a.astype(np.int64).astype(np.uint64)


def derive_seed(master: int, labels: Sequence[int]) -> int:
    """Mix a master seed with an integer label path into a fresh 64-bit seed.

    Distinct label tuples give distinct streams (collision-resistant mixing);
    the chain is order-sensitive, so [1, 2] and [2, 1] differ.
    """
    h = _splitmix64(np.uint64(master & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(_DERIVE_TAG))
    for lab in labels:
        h = _splitmix64(h ^ np.uint64(int(lab) & 0xFFFFFFFFFFFFFFFF))
    return int(h)


@dataclass(frozen=True)
class DistributionSpec:
    """One of the capacity laws: const:c, bern:p, exp:rate, unif:lo:hi."""

    kind: str
    params: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        p = tuple(Fraction(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if self.kind == "const":
            (c,) = p
            if c < 0:
                raise ValueError("constant capacity must be >= 0")
        elif self.kind == "bern":
            (p1,) = p
            if not 0 <= p1 <= 1:
                raise ValueError("Bernoulli mass at 1 must lie in [0, 1]")
        elif self.kind == "exp":
            (rate,) = p
            if rate <= 0:
                raise ValueError("exponential rate must be > 0")
        else:
            lo, hi = p
            if not 0 <= lo < hi:
                raise ValueError("uniform law needs 0 <= lo < hi")

    @classmethod
    def constant(cls, c) -> "DistributionSpec":
        return cls("const", (Fraction(c),))

    @classmethod
    def bernoulli(cls, p_one) -> "DistributionSpec":
        return cls("bern", (Fraction(p_one),))

    @classmethod
    def exponential(cls, rate) -> "DistributionSpec":
        return cls("exp", (Fraction(rate),))

    @classmethod
    def uniform(cls, lo, hi) -> "DistributionSpec":
        return cls("unif", (Fraction(lo), Fraction(hi)))

    def to_string(self) -> str:
        return ":".join([self.kind] + [_format_fraction(v) for v in self.params])

    def __str__(self):
        return self.to_string()


def _format_fraction(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_distribution(text: str) -> DistributionSpec:
    """Parse the CLI form "const:1", "bern:0.7", "exp:1.0", "unif:0:2"."""
    parts = text.strip().split(":")
    kind, args = parts[0], parts[1:]
    want = {"const": 1, "bern": 1, "exp": 1, "unif": 2}.get(kind)
    if want is None:
        raise ValueError(f"unknown distribution {text!r}")
    if len(args) != want:
        raise ValueError(f"{kind} takes {want} parameter(s), got {text!r}")
    return DistributionSpec(kind, tuple(Fraction(a) for a in args))


def mass_at_zero(spec: DistributionSpec) -> Fraction:
    """The atom m({0}) of the (unquantized) law."""
    if spec.kind == "const":
        return Fraction(1) if spec.params[0] == 0 else Fraction(0)
    if spec.kind == "bern":
        return 1 - spec.params[0]
    return Fraction(0)  # exp and unif are continuous (unif has lo < hi)


class TheoremCheck(NamedTuple):
    zero_mass_ok: bool  # m(0) < 1/2
    exp_moment_ok: bool  # some exponential moment finite


def validate_for_theorems(spec: DistributionSpec) -> TheoremCheck:
    """Check the limit-theorem hypotheses on the law.

    All four families have finite exponential moments (bounded support, or
    exp(rate) with any c < rate).  Failing m(0) < 1/2 is a warning, not an
    error: the degenerate regime is still simulable.
    """
    return TheoremCheck(zero_mass_ok=mass_at_zero(spec) < Fraction(1, 2), exp_moment_ok=True)


@dataclass(frozen=True)
class CapacityField:
    """Deterministic assignment of micro-unit capacities to every bond."""

    spec: DistributionSpec
    master_seed: int
    scale: int = MICRO_SCALE

    def _hash_base(self) -> np.uint64:
        return _splitmix64(np.uint64(self.master_seed & 0xFFFFFFFFFFFFFFFF))

    def _micro_from_words(self, h: np.ndarray) -> np.ndarray:
        """Map hash words to quantized micro-unit samples of the law."""
        kind, params = self.spec.kind, self.spec.params
        if kind == "const":
            micro = int((2 * params[0] * self.scale + 1) // 2)  # round half-up, exact
            return np.full(h.shape, micro, dtype=np.int64)
        u = ((h >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53  # (0, 1]
        if kind == "bern":
            return np.where(u <= float(params[0]), np.int64(self.scale), np.int64(0))
        if kind == "exp":
            x = -np.log(u) / float(params[0])
            micro = np.floor(x * self.scale + 0.5).astype(np.int64)
            return np.minimum(micro, np.int64(VALUE_CAP_MICRO))
        lo, hi = float(params[0]), float(params[1])
        x = lo + (hi - lo) * u
        return np.floor(x * self.scale + 0.5).astype(np.int64)

    def bond_micro_grid(self, x0: int, y0: int, w: int, h: int, orientation: int) -> np.ndarray:
        """Capacities of the (h, w) grid of bonds whose lower endpoint is
        (x0+ix, y0+iy), all with the given orientation (0 east, 1 north)."""
        if w <= 0 or h <= 0:
            return np.zeros((max(h, 0), max(w, 0)), dtype=np.int64)
        xs = np.arange(x0, x0 + w, dtype=np.int64)
        ys = np.arange(y0, y0 + h, dtype=np.int64)
        ux, uy = np.meshgrid(_to_u64(xs), _to_u64(ys))
        hh = _splitmix64(self._hash_base() ^ ux)
        hh = _splitmix64(hh ^ uy)
        hh = _splitmix64(hh ^ np.uint64(orientation))
        return self._micro_from_words(hh)

    def capacity_micro(self, e: Bond) -> int:
        """Capacity of a single bond, in micro-units."""
        x, y, o = bond_key(e)
        return int(self.bond_micro_grid(x, y, 1, 1, o)[0, 0])
