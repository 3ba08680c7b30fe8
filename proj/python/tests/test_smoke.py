"""Smoke tests for the python bindings. Run with PYTHONPATH pointing at the
built extension: python test_smoke.py"""

import math
import sys

import svbarrier as sv


def test_params_validation():
    p = sv.HestonParams(r=0.03, kappa=1.0, theta=0.2, epsilon=0.4, rho=-0.3, v0=0.25, s0=1.0)
    assert p.kappa == 1.0
    try:
        sv.HestonParams(r=0.03, kappa=-1.0, theta=0.2, epsilon=0.4, rho=-0.3, v0=0.25, s0=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative kappa should raise ValueError")


def test_black_scholes_and_implied_vol():
    price = sv.bs_call(1.0, 1.0, 1.0, 0.03, 0.2)
    assert abs(price - 0.0941331) < 1e-5
    assert abs(sv.implied_vol(price, 1.0, 1.0, 1.0, 0.03) - 0.2) < 1e-8
    parity = sv.bs_call(1.0, 1.1, 1.0, 0.03, 0.2) - sv.bs_put(1.0, 1.1, 1.0, 0.03, 0.2)
    assert abs(parity - (1.0 - 1.1 * math.exp(-0.03))) < 1e-12


def test_vanilla_transform_vs_mc():
    p = sv.HestonParams(r=0.03, kappa=1.0, theta=0.2, epsilon=0.4, rho=-0.3, v0=0.25, s0=1.0)
    exact = sv.vanilla_call(p, strike=1.0, maturity=1.0)
    assert 0.0 < exact < 1.0
    res = sv.vanilla_call_mc(p, strike=1.0, maturity=1.0, n_paths=20000, seed=3)
    assert abs(res["price"] - exact) < 3.0 * res["std_error"] + 2e-3
    assert res["n_paths"] == 20000 and res["method"] == "WillardMC"


def test_barrier_price():
    p = sv.HestonParams(r=0.03, kappa=1.0, theta=0.2, epsilon=0.4, rho=-0.3, v0=0.25, s0=1.0)
    nt = sv.barrier_price(p, payoff="no_touch", barrier=0.9, strike=float("nan"),
                          maturity=1.0, method="hybrid_mhp", n_paths=500, seed=1)
    assert 0.0 < nt["price"] < math.exp(-0.03) + 1e-12
    doc = sv.barrier_price(p, payoff="down_out_call", barrier=0.9, strike=1.0,
                           maturity=1.0, method="hybrid_mhp", n_paths=500, seed=1)
    vanilla = sv.vanilla_call(p, strike=1.0, maturity=1.0)
    assert 0.0 < doc["price"] < vanilla
    try:
        sv.barrier_price(p, payoff="down_out_call", barrier=1.5, strike=1.0,
                         maturity=1.0, method="hybrid_mhp", n_paths=100, seed=1)
    except ValueError:
        pass
    else:
        raise AssertionError("barrier above spot should raise ValueError")


def test_averaged_green():
    p = sv.HestonParams(r=0.03, kappa=1.0, theta=0.2, epsilon=0.4, rho=-0.3, v0=0.25, s0=1.0)
    x, g = sv.averaged_green(p, barrier=0.9, maturity=1.0, n_paths=50, seed=2)
    assert len(x) == len(g) and len(x) > 10
    assert abs(g[0]) < 1e-12  # zero at the barrier
    mass = sum(gi for gi in g) * (x[1] - x[0])
    assert 0.0 < mass <= 1.0 + 1e-9


def test_joint_min_pdf():
    val = sv.joint_min_pdf(maturity=1.0, a=-1.0, b=0.0, drift=0.0)
    assert abs(val - 0.2159638661) < 1e-4
    try:
        sv.joint_min_pdf(maturity=1.0, a=0.5, b=1.0, drift=0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("a >= 0 should raise ValueError")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for t in tests:
        try:
            t()
            print(f"[ok] {t.__name__}")
        except Exception as e:  # noqa: BLE001 - report and continue
            print(f"[FAIL] {t.__name__}: {e!r}")
            failed += 1
    if failed:
        sys.exit(1)
    print("python smoke tests passed")


if __name__ == "__main__":
    main()
