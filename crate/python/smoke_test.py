"""Smoke test for the bifrac_py extension module."""

import cmath
import json
import math

import bifrac_py as bf


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    k = bf.kernel_value(0.0, 0.0, math.pi / 2)
    assert close(k, 1 / math.sqrt(2 * math.pi), 1e-12), k

    composed = bf.compose_kernels(0.3, 0.4, 0.5, -0.2)
    assert close(composed, bf.kernel_value(0.5, -0.2, 0.7), 1e-8), composed

    try:
        bf.kernel_value(0.0, 0.0, 0.0)
    except bf.BifracError as e:
        assert "SpecialAngle" in str(e)
    else:
        raise AssertionError("kernel at 0 should refuse")

    xs = [-8 + 16 * i / 255 for i in range(256)]
    vac = [complex(math.pi ** -0.25 * math.exp(-x * x / 2)) for x in xs]
    out = bf.apply_fracft(vac, -8.0, 8.0, 1.0)
    assert max(abs(a - b) for a, b in zip(out, vac)) < 1e-6

    tau, sigma, phi = bf.bto_params(1.0, 1.0, 0.3, 0.1)
    assert close(tau, 0.097314313040724974, 1e-12), tau

    u, trusted, trusted_dim = bf.bifrac_operator(0.5, 0.5, 0.6, 0.3, 24)
    n = len(u)
    for i in range(trusted_dim // 2):
        for j in range(trusted_dim // 2):
            s = sum(u[k][i].conjugate() * u[k][j] for k in range(n))
            assert close(s, 1.0 if i == j else 0.0, 1e-8), (i, j, s)

    psi = bf.bifrac_coherent(0.3, 0.2, 0.8, 0.4, 32)
    assert close(sum(abs(a) ** 2 for a in psi), 1.0, 1e-10)

    rows = bf.theta_alpha_sweep(2.0, 2.0, [0.5, 1.0])
    assert all(abs(r[5]) < 1e-6 for r in rows)

    vacuum = [[0j] * 16 for _ in range(16)]
    vacuum[0][0] = 1 + 0j
    grid, ok = bf.phase_space_grid("wigner", vacuum, -2.0, 2.0, 5)
    assert ok and close(grid[2][2], 1.0, 1e-10), grid[2][2]
    q, _ = bf.phase_space_grid("q", vacuum, -1.0, 1.0, 3)
    assert close(q[2][1], cmath.exp(-1), 1e-10), q[2][1]

    report = json.loads(bf.run_verify(dim=32, only=["bifrac.unitarity"]))
    assert report["checks"] and all(c["status"] == "pass" for c in report["checks"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
