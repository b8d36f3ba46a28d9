"""Independent reference computations shared by the test modules.

Nothing here goes through the library's quadrature: the Monte-Carlo oracle
samples the defining double sphere integral directly, and the mpmath oracle
uses a Bessel closed form for the angular integral with its own
Gauss-Gegenbauer rule.
"""

import math
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.special import roots_gegenbauer

from spherecert.profiles import profile_eval


def sphere_sigma(d):
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def _unit(rng, d, size):
    x = rng.standard_normal((size, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def mc_kernel(d, profile, s, samples, seed, block=200_000):
    """Monte-Carlo K_g at |w1 + w2| = s: (estimate, standard error).

    w1 = e_1 and w2 sits at inner product t = s^2/2 - 1 in the (e_1, e_2)
    plane; w3, w4 are uniform on S^{d-1}.  The integrand is
    ghat(|w1 + w2 + w3 + w4|) (|w1 + w2|^2 + |w3 + w4|^2 - (w1 + w2).(w3 + w4)).
    """
    rng = np.random.default_rng(seed)
    t = s * s / 2 - 1
    z = np.zeros(d)
    z[0] = 1 + t
    z[1] = math.sqrt(max(0.0, 1 - t * t))
    total = total_sq = 0.0
    done = 0
    while done < samples:
        n = min(block, samples - done)
        y = _unit(rng, d, n) + _unit(rng, d, n)
        rho = np.minimum(np.linalg.norm(z + y, axis=1), 4.0)
        f = profile_eval(profile, rho) * (z @ z + np.sum(y * y, axis=1) - y @ z)
        total += f.sum()
        total_sq += (f * f).sum()
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    scale = sphere_sigma(d) ** 2
    return scale * mean, scale * math.sqrt(var / samples)


# --- mpmath oracle for Gaussian profiles --------------------------------------

def _gegenbauer_values(x, n, nu):
    p0, p1 = mp.mpf(1), 2 * nu * x
    vals = [p0, p1]
    for m in range(1, n):
        p0, p1 = p1, (2 * (m + nu) * x * p1 - (m + 2 * nu - 1) * p0) / (m + 1)
        vals.append(p1)
    return vals


def _norm_sq_mp(n, nu):
    return (2 ** (1 - 2 * nu) * mp.pi * mp.gamma(n + 2 * nu)
            / (mp.gamma(nu) ** 2 * mp.factorial(n) * (n + nu)))


def gauss_gegenbauer_mp(N, nu):
    """N-point Gauss rule for (1 - t^2)^{nu - 1/2}: Newton-polished nodes, Christoffel weights."""
    x0, _ = roots_gegenbauer(N, float(nu))
    nu = mp.mpf(nu)
    nodes = []
    for x in x0:
        x = mp.mpf(x)
        for _ in range(6):
            v = _gegenbauer_values(x, N, nu)
            # (1 - x^2) C_N' = -N x C_N + (N + 2 nu - 1) C_{N-1}
            deriv = (-N * x * v[N] + (N + 2 * nu - 1) * v[N - 1]) / (1 - x * x)
            x = x - v[N] / deriv
        nodes.append(x)
    norms = [_norm_sq_mp(n, nu) for n in range(N)]
    weights = []
    for x in nodes:
        v = _gegenbauer_values(x, N - 1, nu)
        weights.append(1 / mp.fsum(v[k] ** 2 / norms[k] for k in range(N)))
    return nodes, weights


def kstar_gaussian_mp(d, amp, s):
    """K_g*(s) for ghat = amp exp(-rho^2 / 2).

    The angular integral of exp(-s r c)(s^2 + r^2 - s r c) against
    (1 - c^2)^{(d-3)/2} is a modified Bessel expression; the radial one is
    done after r = 2 sin(phi), which removes the (4 - r^2)^{(d-3)/2} endpoint.
    """
    nu = mp.mpf(d - 2) / 2
    g = mp.sqrt(mp.pi) * mp.gamma(nu + mp.mpf(1) / 2) * 2 ** nu
    sig = 2 * mp.pi ** (mp.mpf(d - 1) / 2) / mp.gamma(mp.mpf(d - 1) / 2)
    const = mp.mpf(2) ** (3 - d) * sig ** 2

    def f(phi):
        r = 2 * mp.sin(phi)
        z = s * r
        if z == 0:
            A, B = mp.sqrt(mp.pi) * mp.gamma(nu + mp.mpf(1) / 2) / mp.gamma(nu + 1), 0
        else:
            A = g * z ** (-nu) * mp.besseli(nu, z)
            B = -g * z ** (-nu) * mp.besseli(nu + 1, z)
        ang = (s * s + r * r) * A - z * B
        return amp * mp.exp(-(s * s + r * r) / 2) * ang * (2 * mp.cos(phi)) ** (d - 2) * r ** (d - 2)

    return const * mp.quad(f, [0, mp.pi / 2], method="gauss-legendre")


def lambda_gaussian_mp(d, amp, ns, N, dps=34):
    """lambda_{d,g}(n) for n in ns by an N-point mp Gauss-Gegenbauer rule."""
    with mp.workdps(dps):
        nu = mp.mpf(d - 2) / 2
        amp = mp.mpf(amp.numerator) / amp.denominator if isinstance(amp, Fraction) else mp.mpf(amp)
        nodes, weights = gauss_gegenbauer_mp(N, nu)
        K = [kstar_gaussian_mp(d, amp, mp.sqrt(2 + 2 * t)) for t in nodes]
        nmax = max(ns)
        tables = [_gegenbauer_values(t, max(nmax, 1), nu) for t in nodes]
        out = {}
        for n in ns:
            acc = mp.fsum(w * k * tab[n] for w, k, tab in zip(weights, K, tables))
            a = acc / _norm_sq_mp(n, nu)
            out[n] = 2 * mp.pi ** (nu + 1) / ((n + nu) * mp.gamma(nu)) * a
        return out
