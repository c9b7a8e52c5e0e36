import numpy as np
import pytest

from lubchain.rng import XorShift64Star
from lubchain.tridiag import Tridiagonal, chain_residual, solve_chain, thomas


def random_spd_tridiag(rng, n):
    diag = rng.uniform_array(n, 2.0, 4.0)
    off = rng.uniform_array(n - 1, -1.0, 0.0)
    return Tridiagonal(off, diag, off.copy())


@pytest.mark.parametrize("n", [1, 2, 3, 17, 200])
def test_thomas_matches_dense(n):
    rng = XorShift64Star(100 + n)
    m = random_spd_tridiag(rng, n)
    rhs = rng.uniform_array(n, -1.0, 1.0)
    x = thomas(m.lower, m.diag, m.upper, rhs)
    expected = np.linalg.solve(m.to_dense(), rhs)
    assert np.max(np.abs(x - expected)) < 1e-12


def test_matvec_roundtrip():
    rng = XorShift64Star(5)
    m = random_spd_tridiag(rng, 50)
    x = rng.uniform_array(50, -1.0, 1.0)
    back = thomas(m.lower, m.diag, m.upper, m.matvec(x))
    assert np.max(np.abs(back - x)) < 1e-12


def test_solve_chain_small_exact():
    # two gaps of 0.3: single unknown, u = f / (1/d1 + 1/d2)
    u, res = solve_chain(np.array([0.3, 0.3]), np.array([1.0]))
    assert u[0] == pytest.approx(0.15, abs=1e-15)
    assert res < 1e-14


def test_solve_chain_boundary_velocities():
    # zero force: solution is linear in the cumulative gap coordinate
    d = np.array([0.1, 0.2, 0.3, 0.4])
    u, res = solve_chain(d, np.zeros(3), u_left=1.0, u_right=0.0)
    cum = np.cumsum(d)
    expected = 1.0 - cum[:-1] / cum[-1]
    assert np.max(np.abs(u - expected)) < 1e-14
    assert res < 1e-14


def test_chain_residual_detects_perturbation():
    d = np.array([0.25, 0.25, 0.25, 0.25])
    u, _ = solve_chain(d, np.ones(3))
    full = np.concatenate(([0.0], u, [0.0]))
    assert np.max(np.abs(chain_residual(d, full, np.ones(3)))) < 1e-13
    full[2] += 1e-6
    assert np.max(np.abs(chain_residual(d, full, np.ones(3)))) > 1e-6


def test_solve_chain_refinement_reaches_exact_gap_system():
    # tight gaps at large n: plain elimination carries an error around 1e-9
    # from rounding 1/d into the matrix; refinement must remove it
    rng = XorShift64Star(77)
    n = 50_000
    d = rng.uniform_array(n, 0.05, 1.05)
    d *= 0.5 / d.sum()
    f = rng.uniform_array(n - 1, -1.0, 1.0)

    dl = d.astype(np.longdouble)
    fl = f.astype(np.longdouble)
    cum = np.cumsum(dl)
    total = cum[-1]
    dk = cum[:-1]
    prefix = np.cumsum(dk * fl)
    tail = np.cumsum((total - dk) * fl)
    u_ref = ((total - dk) * prefix + dk * (tail[-1] - tail)) / total

    u, _ = solve_chain(d, f)
    scale = float(np.max(np.abs(u_ref)))
    assert float(np.max(np.abs(u - u_ref))) / scale < 1e-13
