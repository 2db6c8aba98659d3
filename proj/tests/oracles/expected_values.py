"""Independent high-precision oracles for the frozen expected values in the C++ tests.

Run: python3 tests/oracles/expected_values.py
Every number printed here is pasted verbatim into the corresponding test.
"""
import mpmath as mp

mp.mp.dps = 40


def quad0(f, a):
    # int_0^a f(v) dv for f singular at 0, via v = a e^{-t}
    return a * mp.quad(lambda t: f(a * mp.exp(-t)) * mp.exp(-t), [0, 1, 10, 50, mp.inf])


def tail_integral_quad(dpsi, gamma, u):
    # int_{1-u}^1 (1-s)^{-gamma} dPsi(s), written in tail mass v = 1 - s
    return quad0(lambda v: v ** (-gamma) * dpsi(v), u)


def main():
    print("coef PHT rho=2 n=4 j=1:", 1 - mp.sqrt(mp.mpf(3) / 4))
    print("tail Identity g=0.6 u=0.01:", tail_integral_quad(lambda v: 1, mp.mpf("0.6"), mp.mpf("0.01")))
    rho = mp.mpf("1.2")
    print("tail PHT rho=1.2 g=0.6 u=0.01:",
          tail_integral_quad(lambda v: (1 / rho) * v ** (1 / rho - 1), mp.mpf("0.6"), mp.mpf("0.01")))
    print("tail CTE t=0.9 g=0.75 u=0.05:",
          tail_integral_quad(lambda v: 1 / mp.mpf("0.1"), mp.mpf("0.75"), mp.mpf("0.05")))

    # Hill on the deterministic grid values (1 - j/(n+1))^{-0.75}
    n, k = 1000, 50
    vals = sorted((1 - mp.mpf(j) / (n + 1)) ** mp.mpf("-0.75") for j in range(1, n + 1))
    thr = vals[n - k - 1]
    hill = sum(mp.log(vals[n - j] / thr) for j in range(1, k + 1)) / k
    print("hill grid n=1000 k=50:", hill)
    traj = []
    for kk in range(10, 201):
        thr = vals[n - kk - 1]
        traj.append(sum(mp.log(vals[n - j] / thr) for j in range(1, kk + 1)) / kk)
    traj.sort()
    print("hill grid trajectory median k=10..200:", traj[len(traj) // 2])

    print("floor(10000^0.45):", mp.floor(mp.mpf(10000) ** mp.mpf("0.45")))
    x = mp.mpf("0.5") ** mp.mpf("-0.6") / mp.mpf("0.4")
    print("Zenga p=0.5 x:", x, " H:", 1 - 2 + 2 * (mp.mpf("2.5") / x))

    # variances: (var-1), (var-2)
    def var1(g, r):
        return (g**2 * (g**2 * r**2 - 2 * g**2 * r**3 + 4 * g * r**2 - 2 * g * r + r**2 - 2 * r + 1) / (g * r - 1) ** 2
                + 2 * g**2 * (r + g * r - 1) / (r + 2 * g * r - 2))

    def var2(g):
        return g**4 / ((1 - g) ** 2 * (2 * g - 1))

    print("var1 mean g=0.6:", var1(mp.mpf("0.6"), 1), " var2 g=0.6:", var2(mp.mpf("0.6")))
    print("var2 g=0.75:", var2(mp.mpf("0.75")))
    print("var1 pht rho=1.2 g=0.6:", var1(mp.mpf("0.6"), rho))
    b = 1 / rho - mp.mpf("0.6")
    g = mp.mpf("0.6")
    print("ell pht 1.2 g 0.6:", -b, -g * (1 - 1 / b), -g / b)

    # limit moments from the covariance kernel min(s,t)-st, Pareto reference quantile
    def kernel_limits(g, r):
        be = 1 / r - g
        e11 = g**2 / ((be - 1) * (be - mp.mpf("0.5")))
        e13 = g / (1 - be)
        return e11, e13, e13

    e11, e12, e13 = kernel_limits(g, rho)
    a1, a2, a3 = -b, -g * (1 - 1 / b), -g / b
    qf = a1 * a1 * e11 + a2 * a2 + 2 * a3 * a3 + 2 * a1 * a2 * e12 + 2 * a1 * a3 * e13 + 2 * a2 * a3
    print("kernel quadratic form pht 1.2 g 0.6:", qf)

    # Pareto true values
    print("Pareto 0.6 mean:", quad0(lambda v: v ** mp.mpf("-0.6"), 1))
    print("Pareto 0.6 PHT1.2:", quad0(lambda v: v ** mp.mpf("-0.6") * (1 / rho) * v ** (1 / rho - 1), 1))
    print("Pareto 0.75 CTE0.9:", quad0(lambda v: v ** mp.mpf("-0.75") / mp.mpf("0.1"), mp.mpf("0.1")))
    print("Pareto 0.6 Q(0.5):", mp.mpf("0.5") ** mp.mpf("-0.6"))

    # true values for Burr / Frechet by quadrature (used in sim_lab tests)
    lam, tau = mp.mpf(2), mp.mpf("0.8")
    qb = lambda v: (v ** (-1 / lam) - 1) ** (1 / tau)
    print("Burr(2,0.8) mean:", quad0(qb, 1))
    print("Burr(2,0.8) mean closed:", lam * mp.beta(lam - 1 / tau, 1 + 1 / tau))
    gf = mp.mpf("0.75")
    qf_ = lambda v: (-mp.log1p(-v)) ** (-gf) if 0 < v < 1 else mp.mpf(0)
    print("Frechet(0.75) mean:", quad0(qf_, 1), " closed:", mp.gamma(1 - gf))
    print("Frechet(0.75) CTE0.9:",
          quad0(lambda v: qf_(v) / mp.mpf("0.1"), mp.mpf("0.1")))

    # finite-u exact kernel moments at gamma=0.6, rho=1, u=0.005 (bridge oracle targets)
    u = mp.mpf("0.005")
    be = 1 - g
    w1 = lambda x: g * u ** (mp.mpf("0.5") - be) * x ** (be - 2)
    e11u = mp.quad(lambda y: mp.quad(lambda x: w1(x) * w1(y) * (min(x, y) - x * y), [u, y, 1]), [u, 1])
    e13u = mp.quad(lambda x: w1(x) * u ** mp.mpf("-0.5") * u * (1 - x), [u, 1])
    print("finite u=0.005 E11:", e11u, " E13:", e13u)


if __name__ == "__main__":
    main()
