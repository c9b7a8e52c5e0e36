"""Density and force profiles on [0, 1].

Density profiles are solid fractions with values in [0, 1]; they expose an
exact cumulative integral S(x) = int_0^x rho, which the particle generator
inverts and the continuum solver uses for element vacuum integrals. Force
profiles expose exact antiderivatives and first moments so window averages
and Galerkin loads are closed-form.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import PiecewiseConstantField

_GAUSS_ORDER = 24
_gauss_x, _gauss_w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)


def _gauss_piece(fn, a: float, b: float) -> float:
    """Fixed-order Gauss-Legendre on one analytic piece."""
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _gauss_x
    return float(half * np.dot(_gauss_w, fn(x)))


# ---------------------------------------------------------------------------
# densities


class DensityProfile:
    """Solid fraction rho: [0,1] -> [0,1]."""

    is_piecewise_constant = False

    def value(self, x):
        raise NotImplementedError

    def cumulative(self, x):
        """S(x) = int_0^x rho, exact."""
        raise NotImplementedError

    @property
    def mass(self) -> float:
        return float(self.cumulative(1.0))

    def breakpoints(self) -> np.ndarray:
        """Structure points (always including 0 and 1)."""
        raise NotImplementedError

    def pieces(self) -> list[tuple[float, float, float]]:
        """(a, b, value) pieces; only for piecewise-constant profiles."""
        raise NotImplementedError

    def invert_cumulative(self, target: float) -> float:
        """Leftmost x with S(x) = target; flat runs resolve to their left edge."""
        bps = self.breakpoints()
        cums = np.asarray(self.cumulative(bps), dtype=float)
        if target <= 0.0:
            return float(bps[0])
        if target >= cums[-1]:
            return float(bps[-1])
        idx = int(np.searchsorted(cums, target, side="left"))
        a, b = float(bps[idx - 1]), float(bps[idx])
        ca, cb = float(cums[idx - 1]), float(cums[idx])
        return self._invert_in_piece(target, a, b, ca, cb)

    def _invert_in_piece(self, target, a, b, ca, cb) -> float:
        # generic bisection to 1e-14; subclasses override with closed forms
        lo, hi = a, b
        while hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            if float(self.cumulative(mid)) < target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def integral_against(self, phi, phi_antiderivative=None) -> float:
        """Exact int rho*phi for the closed-form test family.

        Piecewise-constant profiles integrate phi exactly through its
        antiderivative; analytic profiles use fixed-order Gauss per piece
        (exact to roundoff for the smooth family).
        """
        if self.is_piecewise_constant and phi_antiderivative is not None:
            total = 0.0
            for a, b, v in self.pieces():
                total += v * (float(phi_antiderivative(b)) - float(phi_antiderivative(a)))
            return total
        bps = self.breakpoints()
        return sum(
            _gauss_piece(lambda x: np.asarray(self.value(x)) * np.asarray(phi(x)), a, b)
            for a, b in zip(bps[:-1], bps[1:])
        )

    def to_json(self) -> dict:
        raise NotImplementedError


def _check_fraction(v: float, what: str):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ConstantDensity(DensityProfile):
    rho0: float

    is_piecewise_constant = True

    def __post_init__(self):
        _check_fraction(self.rho0, "rho0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.rho0)
        return out if out.ndim else float(out)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        out = self.rho0 * x
        return out if out.ndim else float(out)

    def breakpoints(self) -> np.ndarray:
        return np.array([0.0, 1.0])

    def pieces(self):
        return [(0.0, 1.0, self.rho0)]

    def _invert_in_piece(self, target, a, b, ca, cb):
        return a + (target - ca) / self.rho0

    def to_json(self) -> dict:
        return {"type": "constant", "rho0": self.rho0}


class _PiecewiseConstantDensity(DensityProfile):
    """Shared machinery for step and tabulated densities."""

    is_piecewise_constant = True
    _field: PiecewiseConstantField

    def value(self, x):
        return self._field(x)

    def cumulative(self, x):
        return self._field.cumulative(x)

    def breakpoints(self) -> np.ndarray:
        return self._field.breakpoints

    def pieces(self):
        bp, v = self._field.breakpoints, self._field.values
        return [(float(a), float(b), float(val)) for a, b, val in zip(bp[:-1], bp[1:], v)]

    def _invert_in_piece(self, target, a, b, ca, cb):
        rho = (cb - ca) / (b - a)
        return a + (target - ca) / rho


def _field_from_pieces(pieces) -> PiecewiseConstantField:
    pieces = [(float(a), float(b), float(v)) for a, b, v in pieces]
    if not pieces:
        raise ValueError("empty piece list")
    if abs(pieces[0][0]) > 0 or abs(pieces[-1][1] - 1.0) > 0:
        raise ValueError("pieces must cover [0, 1] exactly")
    bps = [pieces[0][0]]
    vals = []
    for a, b, v in pieces:
        if abs(a - bps[-1]) > 1e-15:
            raise ValueError("pieces must be contiguous")
        _check_fraction(v, "piece value")
        bps.append(b)
        vals.append(v)
    return PiecewiseConstantField(np.array(bps), np.array(vals))


@dataclass(frozen=True)
class StepDensity(_PiecewiseConstantDensity):
    """Contiguous (a, b, value) pieces covering [0, 1]."""

    piece_list: tuple

    def __post_init__(self):
        object.__setattr__(self, "_field", _field_from_pieces(self.piece_list))

    def to_json(self) -> dict:
        return {"type": "step", "pieces": [list(p) for p in self.pieces()]}


@dataclass(frozen=True)
class TabulatedDensity(_PiecewiseConstantDensity):
    field: PiecewiseConstantField

    def __post_init__(self):
        lo, hi = self.field.support
        if lo != 0.0 or hi != 1.0:
            raise ValueError("tabulated density must span [0, 1]")
        for v in self.field.values:
            _check_fraction(float(v), "tabulated value")
        object.__setattr__(self, "_field", self.field)

    def to_json(self) -> dict:
        return {
            "type": "tabulated",
            "breakpoints": [float(x) for x in self.field.breakpoints],
            "values": [float(v) for v in self.field.values],
        }


@dataclass(frozen=True)
class BumpDensity(DensityProfile):
    """Raised-cosine bump: peak * cos^2(pi (x-center)/width) on its support."""

    center: float
    width: float
    peak: float

    def __post_init__(self):
        _check_fraction(self.peak, "peak")
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.center - self.width / 2 < 0 or self.center + self.width / 2 > 1:
            raise ValueError("bump support must lie inside [0, 1]")

    @property
    def _lo(self) -> float:
        return self.center - self.width / 2

    @property
    def _hi(self) -> float:
        return self.center + self.width / 2

    def value(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self._lo) & (x <= self._hi)
        out = np.where(inside, self.peak * np.cos(np.pi * (x - self.center) / self.width) ** 2, 0.0)
        return out if out.ndim else float(out)

    def cumulative(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self._lo, self._hi)
        s = self.peak * (
            0.5 * (xc - self._lo)
            + self.width / (4 * np.pi) * np.sin(2 * np.pi * (xc - self.center) / self.width)
        )
        return s if s.ndim else float(s)

    def breakpoints(self) -> np.ndarray:
        pts = np.unique(np.array([0.0, self._lo, self._hi, 1.0]))
        return pts

    def to_json(self) -> dict:
        return {"type": "bump", "center": self.center, "width": self.width, "peak": self.peak}


# ---------------------------------------------------------------------------
# forces


class ForceProfile:
    """Body force density f in L1(0, 1)."""

    def value(self, x):
        raise NotImplementedError

    def antiderivative(self, x):
        """F with F' = f and F(0) = 0, exact."""
        raise NotImplementedError

    def window_integral(self, a, b):
        """int_a^b f, exact and vectorized over interval endpoints."""
        return self.antiderivative(b) - self.antiderivative(a)

    def moment(self, a: float, b: float) -> float:
        """int_a^b x f(x) dx, exact."""
        raise NotImplementedError

    def l1_norm(self) -> float:
        """Exact ||f||_{L1(0,1)} (the lemma bounds compare against it)."""
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        return np.array([0.0, 1.0])

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantForce(ForceProfile):
    c: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.c)
        return out if out.ndim else float(out)

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        out = self.c * x
        return out if out.ndim else float(out)

    def moment(self, a, b):
        return self.c * (b * b - a * a) / 2.0

    def l1_norm(self):
        return abs(self.c)

    def to_json(self):
        return {"type": "constant", "value": self.c}


@dataclass(frozen=True)
class PolynomialForce(ForceProfile):
    """f(x) = sum coeffs[k] x^k (ascending order)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.polynomial.polynomial.polyval(x, np.array(self.coeffs))
        return out if np.ndim(out) else float(out)

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        anti = np.concatenate(([0.0], np.array(self.coeffs) / np.arange(1, len(self.coeffs) + 1)))
        out = np.polynomial.polynomial.polyval(x, anti)
        return out if np.ndim(out) else float(out)

    def moment(self, a, b):
        mom = np.concatenate(([0.0, 0.0], np.array(self.coeffs) / np.arange(2, len(self.coeffs) + 2)))
        pv = np.polynomial.polynomial.polyval
        return float(pv(b, mom) - pv(a, mom))

    def l1_norm(self):
        # split at the real roots in (0, 1), integrate signed pieces
        pts = [0.0, 1.0]
        roots = np.polynomial.polynomial.polyroots(np.array(self.coeffs))
        for r in roots:
            if abs(r.imag) < 1e-12 and 1e-12 < r.real < 1 - 1e-12:
                pts.append(float(r.real))
        pts = sorted(set(pts))
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            total += abs(float(self.window_integral(a, b)))
        return total

    def to_json(self):
        return {"type": "polynomial", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class SineForce(ForceProfile):
    """f(x) = amplitude * sin(k pi x)."""

    k: int
    amplitude: float = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = self.amplitude * np.sin(self.k * np.pi * x)
        return out if out.ndim else float(out)

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        w = self.k * np.pi
        out = self.amplitude * (1.0 - np.cos(w * x)) / w
        return out if out.ndim else float(out)

    def moment(self, a, b):
        w = self.k * np.pi

        def m(x):
            return np.sin(w * x) / (w * w) - x * np.cos(w * x) / w

        return float(self.amplitude * (m(b) - m(a)))

    def l1_norm(self):
        # |sin| integrates to 2/(k pi) per arch, k arches on [0,1]
        return abs(self.amplitude) * 2.0 / np.pi

    def to_json(self):
        return {"type": "sine", "k": self.k, "amplitude": self.amplitude}


@dataclass(frozen=True)
class TabulatedForce(ForceProfile):
    """Piecewise-constant force."""

    field: PiecewiseConstantField

    def value(self, x):
        return self.field(x)

    def antiderivative(self, x):
        return self.field.cumulative(x)

    def moment(self, a, b):
        bp, v = self.field.breakpoints, self.field.values
        lo = np.clip(bp[:-1], a, b)
        hi = np.clip(bp[1:], a, b)
        return float(np.dot(v, (hi * hi - lo * lo) / 2.0))

    def l1_norm(self):
        return float(np.dot(np.abs(self.field.values), np.diff(self.field.breakpoints)))

    def breakpoints(self):
        return self.field.breakpoints

    def to_json(self):
        return {
            "type": "tabulated",
            "breakpoints": [float(x) for x in self.field.breakpoints],
            "values": [float(v) for v in self.field.values],
        }


# ---------------------------------------------------------------------------
# (de)serialization


def load_step_csv(path: str | Path) -> PiecewiseConstantField:
    """Two-column CSV (right_breakpoint, value); pieces start at 0, end at 1."""
    bps = [0.0]
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            x, v = float(row[0]), float(row[1])
            bps.append(x)
            vals.append(v)
    if not vals or abs(bps[-1] - 1.0) > 1e-12:
        raise ValueError(f"{path}: tabulated profile must end at breakpoint 1.0")
    bps[-1] = 1.0
    return PiecewiseConstantField(np.array(bps), np.array(vals))


def _tabulated_field(obj: dict, base_dir: Path | None) -> PiecewiseConstantField:
    if "path" in obj:
        p = Path(obj["path"])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return load_step_csv(p)
    return PiecewiseConstantField(np.array(obj["breakpoints"], dtype=float),
                                  np.array(obj["values"], dtype=float))


def density_from_json(obj: dict, base_dir: Path | None = None) -> DensityProfile:
    kind = obj.get("type")
    if kind == "constant":
        return ConstantDensity(float(obj["rho0"]))
    if kind == "step":
        return StepDensity(tuple(tuple(p) for p in obj["pieces"]))
    if kind == "bump":
        return BumpDensity(float(obj["center"]), float(obj["width"]), float(obj["peak"]))
    if kind == "tabulated":
        return TabulatedDensity(_tabulated_field(obj, base_dir))
    raise ValueError(f"unknown density type {kind!r}")


def force_from_json(obj: dict, base_dir: Path | None = None) -> ForceProfile:
    kind = obj.get("type")
    if kind == "constant":
        return ConstantForce(float(obj["value"]))
    if kind == "polynomial":
        return PolynomialForce(tuple(obj["coeffs"]))
    if kind == "sine":
        return SineForce(int(obj["k"]), float(obj.get("amplitude", 1.0)))
    if kind in ("tabulated", "step"):
        return TabulatedForce(_tabulated_field(obj, base_dir))
    raise ValueError(f"unknown force type {kind!r}")


def profile_pair_from_json(obj: dict, base_dir: Path | None = None):
    return density_from_json(obj["density"], base_dir), force_from_json(obj["force"], base_dir)


def load_profile_file(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "DensityProfile", "ConstantDensity", "StepDensity", "TabulatedDensity", "BumpDensity",
    "ForceProfile", "ConstantForce", "PolynomialForce", "SineForce", "TabulatedForce",
    "density_from_json", "force_from_json", "profile_pair_from_json",
    "load_step_csv", "load_profile_file",
]
