import math

import mpmath
import numpy as np
import pytest

from monocorr import bounds, cube, families, verify
from monocorr.cube import FunctionTable


def mp_u(x):
    mpmath.mp.dps = 40
    z = mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(x) - 1)
    return float(2 * mpmath.npdf(z) ** 2)


def test_scalar_closed_forms():
    assert bounds.phi(1.0) == 1.0
    assert bounds.psi1(1.0) == 1.0
    assert math.isclose(bounds.psi2(1.0), 1 / math.sqrt(2))
    assert math.isclose(bounds.phi(1 / math.e), 1 / (2 * math.e))
    for fn in (bounds.phi, bounds.psi1, bounds.psi2):
        assert fn(0.0) == 0.0
    assert bounds.psi_n(8, 0.0) == 0.0
    # endpoint 1/sqrt(n): log(e^3/(n x^2)) = 3
    assert math.isclose(bounds.psi_n(4, 0.5), 0.5 / math.sqrt(3))


def test_scalar_vectorized():
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(bounds.phi(x), [bounds.phi(v) for v in x])


def test_scalar_domain_errors():
    with pytest.raises(bounds.DomainError):
        bounds.phi(1.5)
    with pytest.raises(bounds.DomainError):
        bounds.psi1(-0.1)
    with pytest.raises(bounds.DomainError):
        bounds.psi_n(4, 0.6)
    with pytest.raises(bounds.DomainError):
        bounds.psi_n(0, 0.1)


def test_gaussian_u():
    assert math.isclose(bounds.gaussian_u(0.5), 1 / math.pi, rel_tol=1e-15)
    for x in (0.1, 0.3, 0.9, 0.99):
        assert abs(bounds.gaussian_u(x) - mp_u(x)) <= 1e-12
        assert math.isclose(bounds.gaussian_u(x), bounds.gaussian_u(1 - x), rel_tol=1e-12)
    assert abs(bounds.gaussian_u(0.9) - 0.0615993290) <= 1e-9
    with pytest.raises(bounds.DomainError):
        bounds.gaussian_u(1.0)


def test_rhs_examples():
    d = families.dictator(3, 1)
    assert bounds.rhs_talagrand(d, d) == 1.0
    assert cube.covariance(d, d) == 0.25
    d2 = families.dictator(3, 2)
    assert bounds.rhs_talagrand(d, d2) == 0.0 and cube.covariance(d, d2) == 0.0
    maj = families.majority(3)
    assert math.isclose(bounds.rhs_talagrand(maj, maj), 0.75 / (1 + math.log(4 / 3)))
    assert abs(bounds.rhs_talagrand(maj, maj) - 0.58244) < 1e-5
    assert bounds.rhs_w1(d, d) == 1.0
    assert bounds.rhs_kms(d, d) == 1.0
    assert math.isclose(bounds.rhs_similar(maj, maj), 0.75 / (1 + math.log(4 / 3)))


def test_regular_and_statement33_forms():
    t = families.tribes(6, 2)
    i = cube.influence_vector(t)
    n, tot = 6, i.sum()
    expect = tot * tot / (n * (1 + math.log(n) - 2 * math.log(tot)))
    assert math.isclose(bounds.rhs_regular(t, t), expect)
    w = float(i @ i)
    assert math.isclose(bounds.rhs_statement33(t, t), w / (1 - math.log(w * w)))


def test_asymmetric_orders_symmetric_first():
    maj = families.majority(5)
    t = families.pad(families.tribes(4, 2), 1)
    r = bounds.bound_report(t, maj)
    assert r.asymmetric_first == "g"
    assert math.isclose(r.rhs["asymmetric"], bounds.rhs_asymmetric(maj, t))


def test_clamping_flags():
    s = cube.to_signed(families.dictator(2, 1))
    r = bounds.bound_report(s, s)
    assert r.w1_ff == 4.0 and r.clamped_f and not r.conventions_mismatch
    assert r.rhs["talagrand"] == 1.0
    maj = families.majority(3)
    assert not bounds.bound_report(maj, maj).clamped_f


def test_report_serialization():
    d = families.dictator(3, 1)
    r = bounds.bound_report(d, families.dictator(3, 2))
    out = r.to_dict()
    assert out["ratios"]["talagrand"] is None  # infinite ratio becomes null
    row = r.csv_row()
    assert len(row) == len(bounds.CSV_COLUMNS)
    assert "inf" in row
    with pytest.raises(cube.DimensionError):
        bounds.bound_report(d, families.dictator(4, 1))


def test_comparison_claims():
    maj = families.majority(3)
    assert bounds.check_comparison_claims(maj, maj)
    for i in range(200):
        f, g = verify.random_pair(4 + i % 7, 99, i)
        assert bounds.check_comparison_claims(f, g)
