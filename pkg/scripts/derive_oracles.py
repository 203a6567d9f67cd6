"""Independent high-precision reference values frozen into the test suite.

Uses mpmath only: F(u) = u^d / Gamma(d+1) * 1F1(1; d+1; -u) is the fractional
integral of g(u) = exp(-u), so nothing here touches the package's quadrature.
Run:  python3 scripts/derive_oracles.py
"""

import mpmath as mp

mp.mp.dps = 30
ALPHA = mp.mpf("1.5")
D = mp.mpf("0.2")


def F(u):
    if u <= 0:
        return mp.mpf(0)
    return u ** D / mp.gamma(D + 1) * mp.hyp1f1(1, D + 1, -u)


def log_tail(f, start, w_max=160):
    """int_start^inf f(u) du in the variable w = log u; the integrands here decay
    like u^(-1.2) or faster, so the part beyond e^w_max is below 1e-13."""
    return mp.quad(lambda w: f(mp.e ** w) * mp.e ** w, [mp.log(start), 10, 20, 40, 80, w_max])


def norm_alpha_power():
    return mp.quad(lambda u: F(u) ** ALPHA, [0, 1, 10, 100]) + log_tail(lambda u: F(u) ** ALPHA, 100)


def K(th1=1, th2=1):
    return mp.exp(-(abs(th1) ** ALPHA + abs(th2) ** ALPHA) * norm_alpha_power())


def h(x, th1=1, th2=1):
    a = th1 * (x - 1) ** (D - 1)
    b = th2 * x ** (D - 1)
    return abs(a + b) ** ALPHA - abs(a) ** ALPHA - abs(b) ** ALPHA


def C(th1=1, th2=1):
    L = 1 / mp.gamma(D)
    return L ** ALPHA * (mp.quad(lambda x: h(x, th1, th2), [1, 1.5, 2, 10, 100])
                         + log_tail(lambda x: h(x, th1, th2), 100))


def I(t, th1=1, th2=1):
    def integrand(y):
        a = th1 * F(y)
        b = th2 * F(y + t)
        return abs(a + b) ** ALPHA - abs(a) ** ALPHA - abs(b) ** ALPHA
    pts = sorted({0, 1, 10, t, 10 * t})
    return mp.quad(integrand, pts) + log_tail(integrand, 10 * t)


def phi_exp(t, x, th1=1):
    # (1/Gamma(d)) int_1^x th1 exp(t(1-u)) (x-u)^(d-1) du, t < 0
    s = -t
    return th1 / mp.gamma(D) * mp.quad(lambda u: mp.exp(-s * (u - 1)) * (x - u) ** (D - 1), [1, min(x, 1 + 1 / s), x])


def lfsm_norm():
    """|| [(1-x)_+^d - (-x)_+^d] / Gamma(d+1) ||_alpha."""
    k = lambda x: abs((1 - x) ** D - ((-x) ** D if x < 0 else 0)) ** ALPHA  # noqa: E731
    # (1+y)^d - y^d without cancellation for the far tail
    far = lambda y: (y ** D * mp.expm1(D * mp.log1p(1 / y))) ** ALPHA  # noqa: E731
    body = mp.quad(k, [-100, -1, 0, 1]) + log_tail(far, 100)
    return body ** (1 / ALPHA) / mp.gamma(D + 1)


def lam(alpha, p):
    return 2 ** p * mp.gamma((1 + p) / 2) * mp.gamma(1 - p / alpha) / (mp.gamma(1 - p / 2) * mp.sqrt(mp.pi))


if __name__ == "__main__":
    print("lfsm_norm", mp.nstr(lfsm_norm(), 15))
    print("lambda(1.5,1)*lfsm_norm", mp.nstr(lam(ALPHA, 1) * lfsm_norm(), 15))
    print("lambda(1.5,0.7)", mp.nstr(lam(ALPHA, mp.mpf("0.7")), 15))
    print("norm_alpha_power", mp.nstr(norm_alpha_power(), 15))
    print("K(1,1)", mp.nstr(K(), 15))
    print("C(1,1)", mp.nstr(C(), 15))
    print("C(1,-0.5)", mp.nstr(C(1, -0.5), 15))
    for t in (50, 500, 5000):
        print(f"I({t})", mp.nstr(I(t), 15))
    print("I(5; 1, -0.5)", mp.nstr(I(5, 1, -0.5), 15))
    print("phi(-100, 2)", mp.nstr(phi_exp(-100, 2), 15))
    print("F(1), F(10)", mp.nstr(F(1), 15), mp.nstr(F(10), 15))
