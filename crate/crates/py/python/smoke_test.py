"""Smoke test for the compiled `localfield` module.

Build and install first, e.g. `maturin develop --release` from crates/py,
then run `python python/smoke_test.py`.
"""

import math

import localfield


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    eta, kappa = localfield.refractive_index(1.0, 2.116)
    assert close(eta * eta - kappa * kappa, 1.0) and close(2 * eta * kappa, 2.116)

    vacuum = localfield.LorentzMedium(0.1, coupling=0.0)
    rates = vacuum.rates(0.7, 20.0)
    assert close(rates["perp"], 1.0, 1e-14) and rates["par"] == 0.0

    medium = localfield.LorentzMedium(0.01)
    assert close(medium.longitudinal_frequency(), math.sqrt(1 + 0.46**2))
    assert close(medium.static_epsilon(), 1.2116)
    rates = medium.rates(0.5, 20.0)
    assert close(rates["total"], rates["perp"] + rates["par"])

    omega, value = medium.min_gamma_perp(10.0)
    assert value < 0.0, value
    r_min, omega_c = medium.find_r_min()
    assert 10.0 < r_min < 20.0, r_min

    rows = localfield.rmin_curve([0.01, 0.05, 0.2])
    assert rows[0][1] == r_min
    assert rows[1][1] < rows[0][1]
    assert rows[2][3] == "no_sign_change"

    assert close(localfield.commutator_coefficient(1.2116), 1 + 0.2116 / 9)
    assert localfield.validity_margin(10.0)[1] == "violated"

    freqs = [0.01 * 1.2**i for i in range(40)]
    assert localfield.kk_residual(freqs, [2.0] * 40, [0.0] * 40) == 1.0

    try:
        localfield.LorentzMedium(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative damping accepted")

    print(f"smoke test passed: r_min(gamma=0.01) = {r_min:.6f}, min Gamma_perp(r=10) = {value:.3f} at {omega:.5f}")


if __name__ == "__main__":
    main()
