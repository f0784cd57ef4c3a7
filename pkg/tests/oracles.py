"""Independent reference computations shared by the unit and acceptance tests."""
import mpmath as mp

from roughvol.rbergomi import ModelParams

# spans H in {0.05, 0.1, 0.3} with both signs of rho
ORACLE_SETS = [
    ModelParams(0.2, 0.8, 0.05, -0.8),
    ModelParams(0.2, 0.8, 0.1, -0.8),
    ModelParams(0.2, 0.8, 0.3, -0.8),
    ModelParams(0.3, 2.0, 0.1, -0.5),
    ModelParams(0.15, 1.3, 0.3, 0.6),
]


def limit_constants_oracle(params, delta=1.0):
    """The three limit terms straight from their defining integrals with mpmath tanh-sinh."""
    mp.mp.dps = 20
    s0, a, H, rho = (mp.mpf(x) for x in (params.sigma0, params.alpha, params.H, params.rho))
    D = mp.mpf(delta)
    p = H - mp.mpf(0.5)
    # kernels as functions of the lag r - s
    d_var = lambda lag: s0**2 * a * mp.sqrt(2 * H) * lag**p
    d_vol = lambda lag: s0 * a * mp.sqrt(2 * H) * lag**p / 2

    def over_r(f, s):
        # int_s^D f(r - s) dr with r = s + (D - s) x keeps the singularity on a fixed endpoint
        L = D - s
        return L * mp.quad(lambda x: f(L * x), [0, 1]) if L > 0 else mp.mpf(0)

    double = mp.quad(lambda s: over_r(d_var, s), [0, D])
    t1 = 3 * rho**2 / (8 * D ** (3 + 2 * H)) * double**2 / s0**3
    sq = mp.quad(lambda s: over_r(d_vol, s) ** 2, [0, D])
    t2 = -(rho**2) / (2 * D ** (2 + 2 * H)) * sq / s0
    # int_0^D int_s^D int_r^D (u-s)^p (u-r)^p du dr ds with r = s + (D-s) x, u = r + (D-r) y:
    # the s-integral factorises and leaves a unit-square integral with corner singularities
    unit = mp.quad(lambda x, y: (1 - x) ** (p + 1) * y**p * (x + (1 - x) * y) ** p, [0, 1], [0, 1])
    triple = D ** (2 * H + 2) / (2 * H + 2) * unit
    t3 = -(rho**2) / (2 * D ** (2 + 2 * H)) * s0**2 * a**2 * 2 * H * triple / s0
    return float(t1), float(t2), float(t3)


def limit_constants_closed_form(params):
    s0, a, H, rho = params.sigma0, params.alpha, params.H, params.rho
    c2 = a * a * 2 * H
    h = H + 0.5
    return (3 * rho**2 * s0 * c2 / (8 * h**2 * (h + 1) ** 2),
            -(rho**2) * s0 * c2 / (16 * h**2 * (H + 1)),
            -(rho**2) * s0 * c2 / (8 * h**2 * (H + 1)))
