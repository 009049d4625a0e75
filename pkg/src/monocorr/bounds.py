"""Constant-free correlation lower bounds and the scalar functions behind them.

Every ``rhs_*`` evaluator drops its universal constant, so tightness is read off
as the ratio Cov / RHS.  W-quantities are influence products,
W_1(f, g) = sum_i I_i(f) I_i(g).  Under I_k = E|f - f(x + e_k)| an influence
vector can have squared norm above 1 (up to 4 for +-1 tables); such a vector is
rescaled to unit norm before entering the scalar functions, and the report says so.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from . import cube
from .cube import FunctionTable

CSV_SCHEMA = "monocorr-bounds/1"
RHS_NAMES = ("talagrand", "kms", "similar", "regular", "asymmetric", "statement33", "w1")
_STD = NormalDist()


class DomainError(ValueError):
    pass


# -- scalar functions -------------------------------------------------------

def _domain(x, hi: float, name: str):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0) or np.any(arr > hi * (1 + 1e-12)) or np.any(np.isnan(arr)):
        raise DomainError(f"{name}: argument outside [0, {hi:g}]")
    return arr


def _finish(arr, num, den_sq):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(arr > 0, num / np.sqrt(den_sq), 0.0)
    return float(out) if out.ndim == 0 else out


def phi(x):
    """x / log(e / x) on [0, 1]."""
    arr = _domain(x, 1.0, "phi")
    with np.errstate(divide="ignore"):
        den = 1.0 - np.log(arr)
    return _finish(arr, arr, den * den)


def psi1(x):
    """x / sqrt(log(e / x)) on [0, 1]."""
    arr = _domain(x, 1.0, "psi1")
    with np.errstate(divide="ignore"):
        return _finish(arr, arr, 1.0 - np.log(arr))


def psi2(x):
    """x / sqrt(log(e^2 / x)) on [0, 1]."""
    arr = _domain(x, 1.0, "psi2")
    with np.errstate(divide="ignore"):
        return _finish(arr, arr, 2.0 - np.log(arr))


def psi_n(n: int, x):
    """x / sqrt(log(e^3 / (n x^2))) on [0, 1/sqrt(n)]."""
    if n < 1:
        raise DomainError("psi_n needs n >= 1")
    arr = _domain(x, 1.0 / math.sqrt(n), "psi_n")
    with np.errstate(divide="ignore"):
        return _finish(arr, arr, 3.0 - math.log(n) - 2.0 * np.log(arr))


def gaussian_u(x: float) -> float:
    """u(x) = 2 phi(Phi^{-1}(x))^2 with the standard normal density and cdf."""
    if not 0.0 < x < 1.0:
        raise DomainError("gaussian_u needs x in (0, 1)")
    return 2.0 * _STD.pdf(_STD.inv_cdf(x)) ** 2


# -- influence vectors as fed to the scalars --------------------------------

@dataclass(frozen=True)
class _Inf:
    raw: np.ndarray
    vec: np.ndarray  # unit-norm-clamped
    sq: float  # raw sum of squares

    @property
    def clamped(self) -> bool:
        return self.sq > 1.0

    @classmethod
    def of(cls, f: FunctionTable) -> "_Inf":
        raw = cube.influence_vector(f)
        sq = float(np.dot(raw, raw))
        vec = raw / math.sqrt(sq) if sq > 1.0 else raw
        return cls(raw, vec, sq)


def _w(a: _Inf, b: _Inf) -> float:
    return min(float(np.dot(a.vec, b.vec)), 1.0)


def _talagrand(a, b):
    return phi(_w(a, b))


def _kms(a, b):
    return float(np.sum(psi1(np.minimum(a.vec, 1.0)) * psi1(np.minimum(b.vec, 1.0))))


def _similar(a, b):
    w, wa, wb = _w(a, b), min(a.sq, 1.0), min(b.sq, 1.0)
    if w <= 0 or wa <= 0 or wb <= 0:
        return 0.0
    return w / math.sqrt((1.0 - math.log(wa)) * (1.0 - math.log(wb)))


def _regular(a, b, n):
    ia, ib = float(a.vec.sum()), float(b.vec.sum())
    if ia <= 0 or ib <= 0:
        return 0.0
    da = 1.0 + math.log(n) - 2.0 * math.log(ia)
    db = 1.0 + math.log(n) - 2.0 * math.log(ib)
    return ia * ib / (n * math.sqrt(da * db))


def _asymmetric(sym, other, n):
    x = np.minimum(sym.vec, 1.0 / math.sqrt(n))
    return float(np.sum(psi_n(n, x) * psi2(np.minimum(other.vec, 1.0))))


def _statement33(a, b):
    w, p = _w(a, b), min(a.sq, 1.0) * min(b.sq, 1.0)
    if w <= 0 or p <= 0:
        return 0.0
    return w / (1.0 - math.log(p))


def rhs_talagrand(f, g) -> float:
    """phi(W_1(f, g))."""
    return _talagrand(_Inf.of(f), _Inf.of(g))


def rhs_kms(f, g) -> float:
    """sum_i psi1(I_i(f)) psi1(I_i(g))."""
    return _kms(_Inf.of(f), _Inf.of(g))


def rhs_similar(f, g) -> float:
    """W_1(f,g) / (sqrt(log(e/W_1(f,f))) sqrt(log(e/W_1(g,g))))."""
    return _similar(_Inf.of(f), _Inf.of(g))


def rhs_regular(f, g) -> float:
    """I(f) I(g) / (n sqrt(log(e n / I(f)^2)) sqrt(log(e n / I(g)^2)))."""
    return _regular(_Inf.of(f), _Inf.of(g), f.n)


def rhs_asymmetric(f, g) -> float:
    """sum_i psi_n(I_i(f)) psi2(I_i(g)); f is the fully symmetric argument."""
    return _asymmetric(_Inf.of(f), _Inf.of(g), f.n)


def rhs_statement33(f, g) -> float:
    """W_1(f,g) / log(e / (W_1(f,f) W_1(g,g)))."""
    return _statement33(_Inf.of(f), _Inf.of(g))


def rhs_w1(f, g) -> float:
    """sum_i I_i(f) I_i(g), unclamped."""
    return float(np.dot(cube.influence_vector(f), cube.influence_vector(g)))


# -- the report -------------------------------------------------------------

def _ratio(cov: float, rhs: float) -> float:
    return cov / rhs if rhs > 0 else math.inf


def _sim_ratio(a: np.ndarray, b: np.ndarray) -> float:
    keep = (a > 0) | (b > 0)
    a, b = a[keep], b[keep]
    if a.size == 0:
        return 1.0
    if np.any(a == 0) or np.any(b == 0):
        return math.inf
    r = a / b
    return float(r.max() / r.min())


@dataclass
class BoundReport:
    n: int
    mu_f: float
    mu_g: float
    cov: float
    w1: float
    w1_ff: float
    w1_gg: float
    rhs: dict
    ratios: dict
    is_similar: bool
    similarity_max_over_min: float
    is_regular_f: bool
    is_regular_g: bool
    is_fully_symmetric_f: bool
    is_fully_symmetric_g: bool
    asymmetric_first: str
    clamped_f: bool
    clamped_g: bool
    conventions_mismatch: bool
    rhs_asymmetric_second: float
    labels: tuple = field(default=("", ""))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["labels"] = list(self.labels)
        return _json_safe(d)

    def csv_row(self) -> list:
        d = self.to_dict()
        row = [d[c] for c in _CSV_SCALARS]
        row += [d["rhs"][k] for k in RHS_NAMES]
        row += [d["ratios"][k] for k in RHS_NAMES]
        row += [d[c] for c in _CSV_FLAGS]
        return ["inf" if v is None else v for v in row]


_CSV_SCALARS = ("n", "mu_f", "mu_g", "cov", "w1", "w1_ff", "w1_gg")
_CSV_FLAGS = ("is_similar", "similarity_max_over_min", "is_regular_f", "is_regular_g",
              "is_fully_symmetric_f", "is_fully_symmetric_g", "asymmetric_first",
              "clamped_f", "clamped_g", "conventions_mismatch", "rhs_asymmetric_second")
CSV_COLUMNS = (list(_CSV_SCALARS) + [f"rhs_{k}" for k in RHS_NAMES]
               + [f"ratio_{k}" for k in RHS_NAMES] + list(_CSV_FLAGS))


def _json_safe(obj):
    # infinities become null so the output stays strict JSON
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if math.isinf(v) or math.isnan(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def bound_report(f: FunctionTable, g: FunctionTable) -> BoundReport:
    if f.n != g.n:
        raise cube.DimensionError(f"dimension mismatch: {f.n} vs {g.n}")
    n = f.n
    a, b = _Inf.of(f), _Inf.of(g)
    cov = cube.covariance(f, g)
    sym_f, sym_g = cube.is_fully_symmetric(f), cube.is_fully_symmetric(g)
    # the fully symmetric argument goes first in the asymmetric bound
    first, (s, o) = ("g", (b, a)) if sym_g and not sym_f else ("f", (a, b))
    sym_tab = g if first == "g" else f
    mu_s = cube.mean(sym_tab)
    rhs = {
        "talagrand": _talagrand(a, b),
        "kms": _kms(a, b),
        "similar": _similar(a, b),
        "regular": _regular(a, b, n) if n else 0.0,
        "asymmetric": _asymmetric(s, o, n) if n else 0.0,
        "statement33": _statement33(a, b),
        "w1": float(np.dot(a.raw, b.raw)),
    }
    second = (mu_s * (1.0 - mu_s) / math.sqrt(n) * float(np.sum(psi1(np.minimum(o.vec, 1.0))))
              if n else 0.0)
    sim = _sim_ratio(a.raw, b.raw)
    inf_f, inf_g = cube.influences(f), cube.influences(g)
    return BoundReport(
        n=n, mu_f=cube.mean(f), mu_g=cube.mean(g), cov=cov,
        w1=rhs["w1"], w1_ff=a.sq, w1_gg=b.sq,
        rhs=rhs, ratios={k: _ratio(cov, v) for k, v in rhs.items()},
        is_similar=sim <= 1.0 + 1e-9, similarity_max_over_min=sim,
        is_regular_f=inf_f.max_over_min <= 1.0 + 1e-12,
        is_regular_g=inf_g.max_over_min <= 1.0 + 1e-12,
        is_fully_symmetric_f=sym_f, is_fully_symmetric_g=sym_g,
        asymmetric_first=first if (sym_f or sym_g) else "none",
        clamped_f=a.clamped, clamped_g=b.clamped,
        conventions_mismatch=a.sq > 4.0 or b.sq > 4.0,
        rhs_asymmetric_second=second,
        labels=(f.label, g.label),
    )


def check_comparison_claims(f: FunctionTable, g: FunctionTable, tol: float = 1e-12) -> bool:
    """rhs_similar >= rhs_talagrand and rhs_similar >= rhs_kms / 2."""
    a, b = _Inf.of(f), _Inf.of(g)
    sim = _similar(a, b)
    return sim >= _talagrand(a, b) - tol and sim >= 0.5 * _kms(a, b) - tol
