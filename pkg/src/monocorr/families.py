"""Constructors for the monotone families and function pairs used in the lab."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from . import cube
from .cube import INDICATOR, SIGNED, CubeError, FunctionTable, check_size, popcounts


class ExamplePair(NamedTuple):
    f: FunctionTable
    g: FunctionTable
    info: dict


def _binom_tail(n: int, t: int) -> float:
    """P[Bin(n, 1/2) > t]."""
    return sum(math.comb(n, k) for k in range(t + 1, n + 1)) / 2.0 ** n


def hamming_ball(n: int, t: int) -> FunctionTable:
    """Indicator of {x : sum x_i > t}."""
    if not 0 <= t <= n:
        raise CubeError(f"threshold t={t} outside 0..{n}")
    check_size(n)
    vals = (popcounts(n) > t).astype(np.float64)
    return FunctionTable(n, vals, INDICATOR, f"ball(n={n},t={t})")


def ball_threshold(n: int, a: float) -> tuple[int, float]:
    """Integer t whose ball measure is nearest a; ties go to the smaller t."""
    if not 0.0 < a < 1.0:
        raise CubeError(f"target measure a={a} outside (0, 1)")
    best = min(range(n + 1), key=lambda t: (abs(_binom_tail(n, t) - a), t))
    return best, _binom_tail(n, best)


def hamming_ball_mu(n: int, a: float) -> FunctionTable:
    t, mu = ball_threshold(n, a)
    return hamming_ball(n, t).with_label(f"ball(n={n},t={t},mu={mu:.6g})")


def ball_influence(n: int, t: int) -> float:
    """Closed-form I_i of {sum x > t}: x_i pivotal iff the others sum to t."""
    if n == 0 or not 0 <= t <= n - 1:
        return 0.0
    return math.comb(n - 1, t) / 2.0 ** (n - 1)


def majority(n: int) -> FunctionTable:
    if n % 2 == 0:
        raise CubeError("majority requires odd n")
    return hamming_ball(n, n // 2).with_label(f"maj({n})")


def dictator(n: int, i: int) -> FunctionTable:
    if not 1 <= i <= n:
        raise CubeError(f"coordinate {i} out of range 1..{n}")
    check_size(n)
    vals = ((np.arange(1 << n) >> (i - 1)) & 1).astype(np.float64)
    return FunctionTable(n, vals, INDICATOR, f"dict(n={n},i={i})")


def parity(n: int) -> FunctionTable:
    """Non-monotone; for negative tests only."""
    check_size(n)
    vals = (popcounts(n) & 1).astype(np.float64)
    return FunctionTable(n, vals, INDICATOR, f"parity({n})")


def tribes(n: int, r: int) -> FunctionTable:
    """OR over consecutive blocks of width r of the AND of each block."""
    if r <= 0 or n % r:
        raise CubeError(f"tribe width r={r} must divide n={n}")
    check_size(n)
    m = np.arange(1 << n, dtype=np.int64)
    hit = np.zeros(1 << n, dtype=bool)
    for j in range(n // r):
        blk = ((1 << r) - 1) << (j * r)
        hit |= (m & blk) == blk
    return FunctionTable(n, hit.astype(np.float64), INDICATOR, f"tribes(n={n},r={r})")


def suggest_tribe_width(n: int) -> int:
    """round(log2 n - log2 log2 n), moved to the nearest divisor of n."""
    if n < 2:
        return 1
    target = math.log2(n) - math.log2(max(math.log2(n), 1.0))
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    return min(divisors, key=lambda d: (abs(d - round(target)), d))


def _weighted_sums(weights) -> np.ndarray:
    s = np.zeros(1)
    for w in weights:
        s = np.concatenate([s, s + w])
    return s


def ltf(weights, theta: float) -> FunctionTable:
    """+-1 table of sign(sum a_i x_i - theta), with sign(0) = +1."""
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise CubeError("only increasing LTFs (nonnegative weights) are built")
    check_size(w.size)
    vals = np.where(_weighted_sums(w) - theta >= 0, 1.0, -1.0)
    return FunctionTable(w.size, vals, SIGNED, f"ltf(n={w.size},theta={theta:.6g})")


def ltf_theta_for_mean(weights, p: float) -> float:
    """Threshold theta among achieved sums making P[f = +1] nearest p."""
    s = np.sort(_weighted_sums(np.asarray(weights, dtype=np.float64)))
    vals = np.unique(s)
    # P[sum >= v] for every achieved value v
    frac = 1.0 - np.searchsorted(s, vals, side="left") / s.size
    return float(vals[int(np.argmin(np.abs(frac - p)))])


def compose(outer: FunctionTable, inners: list) -> FunctionTable:
    """outer(g_1(block 1), ..., g_n(block n)); block i occupies the next m_i bits."""
    if len(inners) != outer.n:
        raise CubeError(f"need {outer.n} inner functions, got {len(inners)}")
    for g in inners:
        if g.kind != INDICATOR:
            raise CubeError("inner functions must be indicator01")
    total = sum(g.n for g in inners)
    if total > cube.MAX_N:
        raise cube.SizeError(f"composite needs {total} > {cube.MAX_N} coordinates")
    m = np.arange(1 << total, dtype=np.uint32)
    y = np.zeros(1 << total, dtype=np.uint32)
    off = 0
    for i, g in enumerate(inners):
        block = (m >> off) & ((1 << g.n) - 1)
        y |= g.values.astype(np.uint32)[block] << i
        off += g.n
    return FunctionTable(total, outer.values[y], outer.kind, f"compose({outer.label})")


def or_extension(a: FunctionTable, extra: int = 1) -> FunctionTable:
    """{(x, y) : x in A or y_1 = 1} on n + extra coordinates (y_1 is bit n)."""
    total = a.n + extra
    check_size(total)
    m = np.arange(1 << total, dtype=np.int64)
    vals = np.maximum(a.values[m & ((1 << a.n) - 1)], ((m >> a.n) & 1).astype(np.float64))
    return FunctionTable(total, vals, INDICATOR)


def example31(n: int, a: float) -> ExamplePair:
    """A' = A or y on n+1 coordinates, B' = ball of measure 1-a on all n+1."""
    if n + 1 > cube.MAX_N:
        raise cube.SizeError("example31 needs n + 1 <= 24")
    t, mu = ball_threshold(n, a)
    A = hamming_ball(n, t)
    A1 = or_extension(A).with_label(f"ex31.A'(n={n},a={a})")
    B1 = hamming_ball_mu(n + 1, 1.0 - a).with_label(f"ex31.B'(n={n},a={a})")
    return ExamplePair(A1, B1, {"n": n, "a": a, "t": t, "mu_A": mu, "A": A})


def example32(n: int, a: float, max_total: int = cube.MAX_N) -> ExamplePair:
    """A' = A or y_1, B' = B and C(y), C a half-measure ball on ell coordinates.

    ell minimizes |I_1(C) - I_1(B)| over 1 <= ell <= max_total - n (ties to the
    smaller ell); the residual gap is reported in ``info``.
    """
    if n + 1 > max_total:
        raise cube.SizeError("example32 needs n + ell <= max_total with ell >= 1")
    tA, muA = ball_threshold(n, a)
    tB, muB = ball_threshold(n, 1.0 - a)
    target = ball_influence(n, tB)
    best = None
    for ell in range(1, max_total - n + 1):
        tC, _ = ball_threshold(ell, 0.5)
        gap = abs(ball_influence(ell, tC) - target)
        if best is None or gap < best[0]:
            best = (gap, ell, tC)
    gap, ell, tC = best
    A = hamming_ball(n, tA)
    B = hamming_ball(n, tB)
    C = hamming_ball(ell, tC)
    total = n + ell
    m = np.arange(1 << total, dtype=np.int64)
    low = m & ((1 << n) - 1)
    high = m >> n
    A1 = np.maximum(A.values[low], (high & 1).astype(np.float64))
    B1 = B.values[low] * C.values[high]
    info = {"n": n, "a": a, "ell": ell, "t_A": tA, "t_B": tB, "t_C": tC,
            "mu_A": muA, "mu_B": muB, "I_B": target,
            "I_C": ball_influence(ell, tC), "influence_gap": gap}
    return ExamplePair(FunctionTable(total, A1, INDICATOR, f"ex32.A'(n={n},a={a})"),
                       FunctionTable(total, B1, INDICATOR, f"ex32.B'(n={n},a={a})"),
                       info)


def example54(n: int, a: float, weights=None) -> ExamplePair:
    """f_1 = sign(sum a_i x_i - theta) with P[f_1 = 1] ~ 1 - a; f_2 the balanced LTF
    with the same weights (threshold at the midpoint of the weight sum).

    Uniform weights 1/sqrt(n) by default (the Hamming-ball case). Both are +-1.
    """
    w = np.full(n, 1.0 / math.sqrt(n)) if weights is None else np.asarray(weights, float)
    theta = ltf_theta_for_mean(w, 1.0 - a)
    f1 = ltf(w, theta).with_label(f"ex54.f1(n={n},a={a})")
    # theta = 0 over {-1,1}^n is theta = sum(w)/2 over {0,1}^n
    f2 = ltf(w, float(w.sum()) / 2.0).with_label(f"ex54.f2(n={n})")
    return ExamplePair(f1, f2, {"n": n, "a": a, "theta": theta})


def random_monotone(n: int, seed, k: int) -> FunctionTable:
    """Union of the upper shadows of k uniformly random points."""
    if k < 1:
        raise CubeError("k must be >= 1")
    check_size(n)
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 1 << n, size=k)
    m = np.arange(1 << n, dtype=np.int64)
    hit = np.zeros(1 << n, dtype=bool)
    for p in pts:
        hit |= (m & p) == p
    return FunctionTable(n, hit.astype(np.float64), INDICATOR,
                         f"random_monotone(n={n},seed={seed},k={k})")


def pad(f: FunctionTable, extra: int) -> FunctionTable:
    """Same function with ``extra`` dummy coordinates appended."""
    check_size(f.n + extra)
    return FunctionTable(f.n + extra, np.tile(f.values, 1 << extra), f.kind, f.label)


# -- serialized specs -------------------------------------------------------

SPEC_KINDS = ("hamming_ball", "tribes", "majority", "dictator", "ltf", "compose",
              "dual_of", "example31", "example32", "example54", "random_monotone",
              "parity")


@dataclass(frozen=True)
class FamilySpec:
    """A JSON-serializable recipe: ``{"kind": ..., params...}``.

    Field names per kind:
      hamming_ball: n, and t or a     tribes: n, r       majority: n
      dictator: n, i                  ltf: weights, theta
      compose: outer (spec), inners (list of specs)      dual_of: of (spec)
      example31/example32/example54: n, a, part ("f" or "g", default "f");
          example32 also takes max_total (default 24)
      random_monotone: n, seed, k     parity: n (non-monotone)
    """

    kind: str
    params: dict = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        return self.kind != "parity"

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind not in SPEC_KINDS:
            raise CubeError(f"unknown spec kind {kind!r}")
        return cls(kind, d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


def _need(p: dict, *names) -> list:
    missing = [k for k in names if k not in p]
    if missing:
        raise CubeError(f"spec missing field(s): {', '.join(missing)}")
    return [p[k] for k in names]


def materialize(spec: Any) -> FunctionTable:
    """Build the table a FamilySpec (or its dict form) describes."""
    if isinstance(spec, dict):
        spec = FamilySpec.from_dict(spec)
    k, p = spec.kind, spec.params
    if k == "hamming_ball":
        (n,) = _need(p, "n")
        if "t" in p:
            return hamming_ball(int(n), int(p["t"]))
        (a,) = _need(p, "a")
        return hamming_ball_mu(int(n), float(a))
    if k == "tribes":
        n, r = _need(p, "n", "r")
        return tribes(int(n), int(r))
    if k == "majority":
        return majority(int(_need(p, "n")[0]))
    if k == "dictator":
        n, i = _need(p, "n", "i")
        return dictator(int(n), int(i))
    if k == "ltf":
        w, theta = _need(p, "weights", "theta")
        return ltf(w, float(theta))
    if k == "compose":
        outer, inners = _need(p, "outer", "inners")
        return compose(materialize(outer), [materialize(s) for s in inners])
    if k == "dual_of":
        return cube.dual(materialize(_need(p, "of")[0]))
    if k in ("example31", "example32", "example54"):
        n, a = _need(p, "n", "a")
        if k == "example32":
            pair = example32(int(n), float(a), int(p.get("max_total", cube.MAX_N)))
        else:
            pair = {"example31": example31, "example54": example54}[k](int(n), float(a))
        part = p.get("part", "f")
        if part not in ("f", "g"):
            raise CubeError("part must be 'f' or 'g'")
        return pair.f if part == "f" else pair.g
    if k == "random_monotone":
        n, seed, kk = _need(p, "n", "seed", "k")
        return random_monotone(int(n), int(seed), int(kk))
    if k == "parity":
        return parity(int(_need(p, "n")[0]))
    raise CubeError(f"unknown spec kind {k!r}")
