"""Verblunsky coefficient sources indexed over the integers.

Every source is immutable and evaluation is a pure function of (source, n),
so grids of evaluations can run concurrently without locking. The random
kind uses a counter-based generator keyed by (seed, n) rather than a
stateful stream.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass

__all__ = [
    "Verblunsky",
    "CoefficientSource",
    "Explicit",
    "Constant",
    "RandomIID",
    "QuasiPeriodic",
    "Reflected",
    "coefficient",
    "reflect",
]

_M64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _unit_uniform(seed: int, n: int, stream: int) -> float:
    # counter-based: one 64-bit draw per (seed, n, stream), no shared state
    key = _splitmix64((seed & _M64) ^ _splitmix64((n & _M64) ^ (stream * 0xD6E8FEB86659FD93)))
    return key / 2.0**64


@dataclass(frozen=True)
class Verblunsky:
    """A single coefficient alpha with its complementary rho = sqrt(1 - |alpha|^2)."""

    alpha: complex
    rho: float

    @classmethod
    def of(cls, alpha: complex) -> "Verblunsky":
        a = complex(alpha)
        m2 = a.real * a.real + a.imag * a.imag
        if m2 > 1.0:
            raise ValueError(f"coefficient modulus {math.sqrt(m2)} exceeds 1")
        return cls(a, math.sqrt(max(0.0, 1.0 - m2)))


class CoefficientSource:
    """Base for coefficient sources. Subclasses implement alpha_at(n)."""

    def alpha_at(self, n: int) -> complex:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Explicit(CoefficientSource):
    """Finite window of explicit values; values[j] sits at index base + j."""

    values: tuple
    base: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    def alpha_at(self, n: int) -> complex:
        j = n - self.base
        if not (0 <= j < len(self.values)):
            raise IndexError(
                f"index {n} outside explicit window [{self.base}, {self.base + len(self.values) - 1}]"
            )
        return self.values[j]

    def describe(self) -> dict:
        return {
            "kind": "explicit",
            "base": self.base,
            "values": [[v.real, v.imag] for v in self.values],
        }


@dataclass(frozen=True)
class Constant(CoefficientSource):
    alpha: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))

    def alpha_at(self, n: int) -> complex:
        return self.alpha

    def describe(self) -> dict:
        return {"kind": "constant", "alpha": [self.alpha.real, self.alpha.imag]}


@dataclass(frozen=True)
class RandomIID(CoefficientSource):
    """IID draws, uniform w.r.t. area on the disk of the given radius."""

    seed: int = 0
    radius: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.radius < 1.0):
            raise ValueError("radius must lie in [0, 1)")

    def alpha_at(self, n: int) -> complex:
        u = _unit_uniform(self.seed, n, 1)
        v = _unit_uniform(self.seed, n, 2)
        return self.radius * math.sqrt(u) * cmath.exp(2j * math.pi * v)

    def describe(self) -> dict:
        return {"kind": "random_iid", "seed": self.seed, "radius": self.radius}


@dataclass(frozen=True)
class QuasiPeriodic(CoefficientSource):
    """alpha_n = coupling * exp(2 pi i (n*frequency + phase))."""

    coupling: float = 0.5
    frequency: float = (math.sqrt(5.0) - 1.0) / 2.0
    phase: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.coupling < 1.0):
            raise ValueError("coupling must lie in [0, 1)")

    def alpha_at(self, n: int) -> complex:
        return self.coupling * cmath.exp(2j * math.pi * (n * self.frequency + self.phase))

    def describe(self) -> dict:
        return {
            "kind": "quasiperiodic",
            "coupling": self.coupling,
            "frequency": self.frequency,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class Reflected(CoefficientSource):
    """Index-reversed twin: alpha~_n = -conj(alpha_{-(n+2)})."""

    inner: CoefficientSource

    def alpha_at(self, n: int) -> complex:
        return -self.inner.alpha_at(-(n + 2)).conjugate()

    def describe(self) -> dict:
        return {"kind": "reflected", "inner": self.inner.describe()}


def coefficient(source: CoefficientSource, n: int) -> Verblunsky:
    """Evaluate the source at integer index n, with rho attached."""
    return Verblunsky.of(source.alpha_at(n))


def reflect(source: CoefficientSource) -> CoefficientSource:
    """Return the source with coefficients alpha~_n = -conj(alpha_{-(n+2)}).

    Closed forms are used where the reflected sequence stays within the same
    kind; other kinds get a lazy wrapper. Reflecting twice returns a source
    equal to the original.
    """
    if isinstance(source, Constant):
        return Constant(-source.alpha.conjugate())
    if isinstance(source, Explicit):
        # original covers [base, base+len-1]; the image covers
        # [-(base+len)-1, -(base+2)] with reversed order
        vals = tuple(-v.conjugate() for v in reversed(source.values))
        new_base = -(source.base + len(source.values)) - 1
        return Explicit(vals, new_base)
    if isinstance(source, QuasiPeriodic):
        # -conj(lam e^{2 pi i((-n-2)b + t)}) = lam e^{2 pi i(n b + 2b - t + 1/2)}
        lam, b, t = source.coupling, source.frequency, source.phase
        return QuasiPeriodic(lam, b, (2.0 * b - t + 0.5) % 1.0)
    if isinstance(source, Reflected):
        return source.inner
    return Reflected(source)


def source_from_dict(d: dict) -> CoefficientSource:
    """Inverse of describe(); used by the CLI config loader."""
    kind = d.get("kind")
    if kind == "explicit":
        vals = [complex(re, im) for re, im in d["values"]]
        return Explicit(tuple(vals), int(d.get("base", 0)))
    if kind == "constant":
        a = d["alpha"]
        alpha = complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
        return Constant(alpha)
    if kind == "random_iid":
        return RandomIID(int(d.get("seed", 0)), float(d.get("radius", 0.5)))
    if kind == "quasiperiodic":
        return QuasiPeriodic(
            float(d.get("coupling", 0.5)),
            float(d.get("frequency", (math.sqrt(5.0) - 1.0) / 2.0)),
            float(d.get("phase", 0.0)),
        )
    if kind == "reflected":
        return Reflected(source_from_dict(d["inner"]))
    raise ValueError(f"unknown source kind: {kind!r}")
