"""Dense functions on the discrete cube {0,1}^n and their Fourier-Walsh analysis.

Points are bitmasks: bit (i-1) of a mask holds coordinate x_i, so flipping x_i
is ``m ^ (1 << (i - 1))``.  Characters are v_S(x) = prod_{i in S} (2 x_i - 1),
which gives increasing functions nonnegative first-level coefficients.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

INDICATOR = "indicator01"
SIGNED = "signed_pm1"
BOUNDED = "bounded"
KINDS = (INDICATOR, SIGNED, BOUNDED)

MAX_N = 24
_KIND_TOL = 1e-9


class CubeError(ValueError):
    """Invalid input to a cube operation."""


class DimensionError(CubeError):
    pass


class KindError(CubeError):
    pass


class DegenerateInputError(CubeError):
    pass


class SizeError(CubeError):
    pass


def check_size(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise SizeError(f"n={n} outside supported range 0..{MAX_N}")
    need = 3 * 8 * (1 << n)
    try:
        avail = os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return
    if need > avail:
        raise SizeError(f"n={n} needs ~{need >> 20} MiB, only {avail >> 20} MiB free")


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Values of f at all 2^n points, with a declared value kind."""

    n: int
    values: np.ndarray
    kind: str = BOUNDED
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindError(f"unknown kind {self.kind!r}")
        check_size(self.n)
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n,):
            raise DimensionError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if self.kind == INDICATOR:
            ok = np.all((vals == 0.0) | (vals == 1.0))
        elif self.kind == SIGNED:
            ok = np.all((vals == -1.0) | (vals == 1.0))
        else:
            ok = vals.size == 0 or (vals.min() >= -1 - _KIND_TOL and vals.max() <= 1 + _KIND_TOL)
        if not ok:
            raise KindError(f"values violate kind {self.kind}")
        if vals is self.values and vals.flags.writeable:
            vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"FunctionTable(n={self.n}, kind={self.kind}{tag})"

    def with_label(self, label: str) -> "FunctionTable":
        return FunctionTable(self.n, self.values, self.kind, label)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier-Walsh coefficients; ``coeffs[mask(S)]`` is the coefficient of v_S."""

    n: int
    coeffs: np.ndarray

    def level(self, d: int) -> np.ndarray:
        return self.coeffs[popcounts(self.n) == d]

    def first_level(self) -> np.ndarray:
        return self.coeffs[[1 << i for i in range(self.n)]]


@dataclass(frozen=True)
class InfluenceProfile:
    influences: np.ndarray
    total: float
    max_over_min: float


@dataclass(frozen=True)
class LevelWeights:
    """sw[d] = sum over |S| = d of f^(S) g^(S), plus the influence-product W_1."""

    n: int
    sw: np.ndarray
    w1_influence: float

    @property
    def cov(self) -> float:
        return float(self.sw[1:].sum())

    def noise_correlation(self, rho):
        """<T_rho f, g> as a polynomial in rho."""
        return np.polynomial.polynomial.polyval(rho, self.sw)

    def noise_correlation_derivative(self, rho):
        return np.polynomial.polynomial.polyval(rho, np.polynomial.polynomial.polyder(self.sw))


@lru_cache(maxsize=8)
def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every mask below 2^n (read-only, cached)."""
    p = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        p[1 << i: 2 << i] = p[: 1 << i] + 1
    p.flags.writeable = False
    return p


def _pairs(a: np.ndarray, i: int) -> np.ndarray:
    # axis 1 of the view is coordinate i (1-based): [:, 0, :] has x_i = 0
    return a.reshape(-1, 2, 1 << (i - 1))


def _check_coord(f: FunctionTable, i: int) -> None:
    if not 1 <= i <= f.n:
        raise CubeError(f"coordinate {i} out of range 1..{f.n}")


def _same_n(f: FunctionTable, g: FunctionTable) -> None:
    if f.n != g.n:
        raise DimensionError(f"dimension mismatch: {f.n} vs {g.n}")


# -- construction and kind conversion ---------------------------------------

def from_family(n: int, members: Iterable[int]) -> FunctionTable:
    """Indicator of a family given as member bitmasks."""
    check_size(n)
    vals = np.zeros(1 << n)
    idx = np.fromiter((int(m) for m in members), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= 1 << n):
        raise CubeError(f"family member out of range for n={n}")
    vals[idx] = 1.0
    return FunctionTable(n, vals, INDICATOR)


def to_signed(f: FunctionTable) -> FunctionTable:
    """F = 2f - 1 for an indicator; identity on signed tables."""
    if f.kind == SIGNED:
        return f
    if f.kind != INDICATOR:
        raise KindError("only indicator01 tables convert to signed_pm1")
    return FunctionTable(f.n, 2.0 * f.values - 1.0, SIGNED, f.label)


def to_indicator(f: FunctionTable) -> FunctionTable:
    """f = (F + 1) / 2 for a signed table; identity on indicators."""
    if f.kind == INDICATOR:
        return f
    if f.kind != SIGNED:
        raise KindError("only signed_pm1 tables convert to indicator01")
    return FunctionTable(f.n, (f.values + 1.0) / 2.0, INDICATOR, f.label)


# -- transforms -------------------------------------------------------------

def _butterfly(buf: np.ndarray, n: int, inverse: bool) -> None:
    # in place on buf; one half-size temporary per stage
    for i in range(1, n + 1):
        v = _pairs(buf, i)
        lo, hi = v[:, 0, :], v[:, 1, :]
        if inverse:
            t = hi.copy()
            hi += lo
            lo -= t
        else:
            t = lo.copy()
            lo += hi
            hi -= t


def wht_forward(f: FunctionTable) -> Spectrum:
    buf = np.array(f.values, dtype=np.float64)
    _butterfly(buf, f.n, inverse=False)
    buf *= 1.0 / (1 << f.n)
    return Spectrum(f.n, buf)


def wht_inverse(s: Spectrum) -> FunctionTable:
    buf = np.array(s.coeffs, dtype=np.float64)
    _butterfly(buf, s.n, inverse=True)
    return FunctionTable(s.n, buf, BOUNDED)


# -- moments ----------------------------------------------------------------

def mean(f: FunctionTable) -> float:
    return float(f.values.sum()) / (1 << f.n)


def inner(f: FunctionTable, g: FunctionTable) -> float:
    _same_n(f, g)
    return float(np.dot(f.values, g.values)) / (1 << f.n)


def covariance(f: FunctionTable, g: FunctionTable) -> float:
    return inner(f, g) - mean(f) * mean(g)


def norm2(f: FunctionTable) -> float:
    return float(np.sqrt(inner(f, f)))


# -- influences, derivatives ------------------------------------------------

def influence(f: FunctionTable, k: int) -> float:
    """I_k(f) = E|f(x) - f(x + e_k)|."""
    _check_coord(f, k)
    v = _pairs(f.values, k)
    return 2.0 * float(np.abs(v[:, 1, :] - v[:, 0, :]).sum()) / (1 << f.n)


def influence_vector(f: FunctionTable) -> np.ndarray:
    return np.array([influence(f, k) for k in range(1, f.n + 1)])


def influences(f: FunctionTable) -> InfluenceProfile:
    inf = influence_vector(f)
    lo = inf.min() if inf.size else 0.0
    ratio = float("inf") if lo == 0 else float(inf.max() / lo)
    return InfluenceProfile(inf, float(inf.sum()), ratio)


def derivative(f: FunctionTable, i: int) -> FunctionTable:
    """Delta_i f(x) = (f(x) - f(x + e_i)) / 2."""
    _check_coord(f, i)
    v = _pairs(f.values, i)
    out = np.empty_like(v)
    out[:, 1, :] = 0.5 * (v[:, 1, :] - v[:, 0, :])
    out[:, 0, :] = -out[:, 1, :]
    return FunctionTable(f.n, out.reshape(-1), BOUNDED)


# -- noise ------------------------------------------------------------------

def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise CubeError(f"rho={rho} outside [0, 1]")


def noise(f: FunctionTable, rho: float) -> FunctionTable:
    """T_rho f, applied on the spectrum."""
    _check_rho(rho)
    s = wht_forward(f)
    scale = np.power(float(rho), popcounts(f.n).astype(np.float64))
    return wht_inverse(Spectrum(f.n, s.coeffs * scale))


def noise_direct(f: FunctionTable, rho: float) -> FunctionTable:
    """T_rho f by summing over all 3^n keep/reset-to-0/reset-to-1 patterns.

    Independent of the transform; limited to n <= 8.
    """
    _check_rho(rho)
    if f.n > 8:
        raise SizeError("direct noise enumeration is limited to n <= 8")
    n = f.n
    xs = np.arange(1 << n)
    out = np.zeros(1 << n)
    full = (1 << n) - 1
    keep_p, reset_p = rho, (1.0 - rho) / 2.0
    for pattern in np.ndindex(*([3] * n)):
        keep = set1 = 0
        p = 1.0
        for i, c in enumerate(pattern):
            if c == 0:
                keep |= 1 << i
                p *= keep_p
            else:
                p *= reset_p
                if c == 2:
                    set1 |= 1 << i
        if p == 0.0:
            continue
        out += p * f.values[(xs & keep) | (set1 & full)]
    return FunctionTable(n, np.clip(out, -1.0, 1.0), BOUNDED)


def level_weights(f: FunctionTable, g: FunctionTable) -> LevelWeights:
    _same_n(f, g)
    fs = wht_forward(f).coeffs
    gs = fs if g is f else wht_forward(g).coeffs
    sw = np.bincount(popcounts(f.n), weights=fs * gs, minlength=f.n + 1)
    inf_f = influence_vector(f)
    inf_g = inf_f if g is f else influence_vector(g)
    return LevelWeights(f.n, sw, float(np.dot(inf_f, inf_g)))


def noise_correlation(f: FunctionTable, g: FunctionTable, rho: float) -> float:
    _check_rho(rho)
    return float(level_weights(f, g).noise_correlation(rho))


def noise_stability(f: FunctionTable, eps: float) -> float:
    """NS_eps(f) = 1/2 - 1/2 sum_S (1 - 2 eps)^|S| f^(S)^2, for +-1 tables."""
    if f.kind != SIGNED:
        raise KindError("noise_stability requires a signed_pm1 table")
    if not 0.0 <= eps <= 1.0:
        raise CubeError(f"eps={eps} outside [0, 1]")
    c = wht_forward(f).coeffs
    w = np.bincount(popcounts(f.n), weights=c * c, minlength=f.n + 1)
    return float(0.5 - 0.5 * np.polynomial.polynomial.polyval(1.0 - 2.0 * eps, w))


# -- order structure and symmetries -----------------------------------------

def is_monotone(f: FunctionTable, tol: float = 0.0) -> bool:
    for i in range(1, f.n + 1):
        v = _pairs(f.values, i)
        if np.any(v[:, 1, :] < v[:, 0, :] - tol):
            return False
    return True


def dual(f: FunctionTable) -> FunctionTable:
    """x -> 1 - f(complement x) for indicators, -f(complement x) for +-1."""
    # complementing every bit reverses the mask order
    rev = f.values[::-1]
    if f.kind == INDICATOR:
        return FunctionTable(f.n, 1.0 - rev, INDICATOR)
    if f.kind == SIGNED:
        return FunctionTable(f.n, -rev, SIGNED)
    raise KindError("dual requires an indicator01 or signed_pm1 table")


def restrict(f: FunctionTable, i: int, bit: int) -> FunctionTable:
    """Fix x_i = bit; remaining coordinates keep their order."""
    _check_coord(f, i)
    if bit not in (0, 1):
        raise CubeError("bit must be 0 or 1")
    v = _pairs(f.values, i)[:, bit, :]
    return FunctionTable(f.n - 1, v.reshape(-1), f.kind)


def permute(f: FunctionTable, perm) -> FunctionTable:
    """Relabel coordinates: new x_{perm[i]} is old x_i (0-based perm of range(n))."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(f.n)):
        raise CubeError("perm must be a permutation of range(n)")
    if f.n == 0:
        return f
    # C-order axis j of the (2,)*n view holds bit n-1-j
    arr = f.values.reshape((2,) * f.n)
    axes = [0] * f.n
    for old, new in enumerate(perm):
        axes[f.n - 1 - new] = f.n - 1 - old
    return FunctionTable(f.n, np.transpose(arr, axes).reshape(-1), f.kind)


def transpose_coords(f: FunctionTable, i: int, j: int) -> FunctionTable:
    """Swap coordinates x_i and x_j (1-based)."""
    perm = list(range(f.n))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return permute(f, perm)


def is_fully_symmetric(f: FunctionTable) -> bool:
    """Invariance under S_n; adjacent transpositions generate the group."""
    for i in range(1, f.n):
        if not np.array_equal(transpose_coords(f, i, i + 1).values, f.values):
            return False
    return True


def tau_regularity(f: FunctionTable) -> float:
    """Smallest tau with I_i(f) <= tau ||f||_2 for all i."""
    nrm = norm2(f)
    inf = influence_vector(f)
    if nrm == 0:
        return 0.0 if not inf.any() else float("inf")
    return float(inf.max() / nrm) if inf.size else 0.0


def similarity_ratio(f: FunctionTable, g: FunctionTable) -> tuple[float, float]:
    """Extremal ratios I_i(f) / I_i(g)."""
    _same_n(f, g)
    a, b = influence_vector(f), influence_vector(g)
    if np.any(b == 0):
        raise DegenerateInputError("zero influence in similarity denominator")
    r = a / b
    return float(r.min()), float(r.max())
