"""Pin the implied-constant fixtures with an oracle that shares no numerics
with the package.

Instances come from ``monocorr.verify`` (they are inputs, not results).  Spectra
use an explicit Sylvester Hadamard matrix, influences flip bits by explicit
XOR indexing, and covariances are plain averages.  Run from the repo root:

    python3 tools/pin_constants.py
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
import mpmath
from scipy.linalg import hadamard

from monocorr import families, verify

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "implied_constants.json"
_H = {}


def spectrum(vals: np.ndarray, n: int) -> np.ndarray:
    # Sylvester rows are (-1)^{|S & x|}; the character prod(2x_i - 1) adds (-1)^{|S|}
    if n not in _H:
        _H[n] = hadamard(1 << n).astype(np.float64)
    sizes = np.array([bin(s).count("1") for s in range(1 << n)])
    return (_H[n] @ vals) / (1 << n) * np.where(sizes % 2, -1.0, 1.0), sizes


def influences(vals: np.ndarray, n: int) -> list:
    x = np.arange(1 << n)
    v = np.asarray(vals, dtype=np.float64)
    return [float(np.abs(v - v[x ^ (1 << k)]).mean()) for k in range(n)]


def cov(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(a * b) - np.mean(a) * np.mean(b))


def level_sum(fa, fb, sizes, d) -> float:
    return float(np.sum((fa * fb)[sizes == d]))


def talagrand_lemma(f, g) -> float:
    a, b = 2.0 * f.values - 1.0, 2.0 * g.values - 1.0
    fa, sizes = spectrum(a, f.n)
    fb, _ = spectrum(b, f.n)
    w1 = level_sum(fa, fb, sizes, 1)
    if w1 <= 0 or f.n < 2:
        return 0.0
    return level_sum(fa, fb, sizes, 2) / (w1 * (1.0 - math.log(w1)))


def chang(h) -> float | None:
    v = np.asarray(h.values, dtype=np.float64)
    if v.mean() > 0.5:
        v = 1.0 - v
    m = float(v.mean())
    if m == 0:
        return 0.0
    c, sizes = spectrum(v, h.n)
    return float(np.sum(c[sizes == 1] ** 2)) / (m * m * (1.0 - math.log(m)))


def tightness(f, g) -> float:
    fi = np.array(influences(f.values, f.n))
    gi = np.array(influences(g.values, g.n))
    # vectors with squared norm above 1 are rescaled to unit norm
    for v in (fi, gi):
        s = float(np.dot(v, v))
        if s > 1.0:
            v /= math.sqrt(s)
    w = min(float(np.dot(fi, gi)), 1.0)
    rhs = w / (1.0 - math.log(w)) if w > 0 else 0.0
    c = cov(f.values, g.values)
    return c / rhs if rhs > 0 else math.inf


def u_mp(x: float) -> float:
    mpmath.mp.dps = 40
    z = mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(x) - 1)
    return float(2 * mpmath.npdf(z) ** 2)


def mors_majority(n: int) -> dict:
    f = 2.0 * families.majority(n).values - 1.0
    x = np.arange(1 << n)
    # level-1 coefficients as direct character averages; a 2^15 Hadamard matrix would not fit
    w1 = sum(float(np.mean(f * (2.0 * ((x >> i) & 1) - 1.0))) ** 2 for i in range(n))
    infl = influences(f, n)
    tau = max(infl) / math.sqrt(float(np.mean(f * f)))
    gap = abs(w1 - u_mp((1.0 + float(f.mean())) / 2.0))
    return {"n": n, "gap": gap, "tau_sixth": tau ** (1.0 / 6.0), "slack": gap / tau ** (1.0 / 6.0) - 1.0}


def main() -> int:
    tal = chang_max = 0.0
    count = 0
    for f, g in verify.standard_suite(verify.SUITE_SEED):
        count += 1
        tal = max(tal, talagrand_lemma(f, g))
        for h in (f, g):
            c = chang(h)
            if c is not None:
                chang_max = max(chang_max, c)
    tmin = min(tightness(f, g) for f, g in verify.tightness_suite())
    data = {
        "version": 1,
        "seed": verify.SUITE_SEED,
        "suite": ("standard_suite: tribes (n,r) in {(4,2),(6,2),(6,3),(8,2),(8,4),(9,3),(10,2),"
                  "(10,5),(12,3),(12,4)} vs dual and self; Hamming balls n=5..12 every t vs dual "
                  "and vs the half ball; seeded LTFs n in {6,8,10,12} x3 weight draws x "
                  "p in {0.1,0.3,0.5} vs dual; 60 seeded random monotone pairs n=4..12"),
        "tightness_suite": "tribes(16,4) vs dual; hamming_ball(n,t) vs dual, n in {12,16,20}, t in [ceil(n/2), n-1]",
        "pairs": count,
        "talagrand_lemma_max": tal,
        "chang_max": chang_max,
        "tightness_min": tmin,
        "tolerance": 1e-9,
        "chang_ball_n12_a0.125": chang(families.hamming_ball_mu(12, 0.125)),
        "mors_majority15": mors_majority(15),
        "u_0.9": u_mp(0.9),
    }
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(json.dumps(data, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
