"""50-digit reference arithmetic for the closed-form thresholds.

Direct transcription of each formula in mpmath, sharing no code with the
package beyond the parameter containers.
"""

import mpmath as mp

mp.mp.dps = 50


def _m(x):
    return mp.mpf(x)


def _atoms(levy):
    return [(_m(a.w), _m(a.eta1), _m(a.eta2), _m(a.eta3)) for a in levy.atoms]


def sigma_bar(noise):
    return max(_m(noise.sigma1) ** 2, _m(noise.sigma2) ** 2, _m(noise.sigma3) ** 2)


def r0(p):
    return _m(p.beta) * _m(p.A) / (_m(p.mu1) * (_m(p.mu2) + _m(p.delta) + _m(p.gamma)))


def chi(p, noise, levy):
    s = mp.fsum(w * max(max(e) ** 2, min(e) ** 2) for w, *e in _atoms(levy))
    return 2 * _m(p.mu1) - sigma_bar(noise) - s


def g(x, q):
    return (1 + x) ** q - 1 - q * x


def ell(levy, n, p):
    q = n * _m(p)
    return mp.fsum(w * max(g(max(e), q), g(min(e), q)) for w, *e in _atoms(levy))


def gamma_np(p, noise, levy, n, pp):
    q = n * _m(pp)
    return _m(p.mu1) - (q - 1) / 2 * sigma_bar(noise) - ell(levy, n, pp) / q


def delta_sup(A, gam, n, pp):
    """Supremum by solving the first-order condition, then evaluating."""
    A, gam, q = _m(A), _m(gam), n * _m(pp)
    if q == 1:
        return A
    f = lambda N: A * N ** (q - 1) - gam / 2 * N ** q
    n_star = mp.findroot(lambda N: A * (q - 1) * N ** (q - 2) - gam * q / 2 * N ** (q - 1),
                         2 * A * (q - 1) / (gam * q) * mp.mpf("1.1"))
    return f(n_star)


def j2(levy):
    return mp.fsum(w * (e[1] - mp.log(1 + e[1])) for w, *e in _atoms(levy))


def exit_rate(p, noise):
    return _m(p.mu2) + _m(p.delta) + _m(p.gamma) + _m(noise.sigma2) ** 2 / 2


def r0s(p, noise, levy):
    A, mu1 = _m(p.A), _m(p.mu1)
    return (_m(p.beta) * A / mu1 - A ** 2 * _m(noise.sigma_beta) ** 2 / (mu1 * chi(p, noise, levy))
            - j2(levy)) / exit_rate(p, noise)


def r0hat(p, noise, levy):
    A, mu1 = _m(p.A), _m(p.mu1)
    return (_m(p.beta) * A / mu1 - _m(noise.sigma_beta) ** 2 * A ** 2 / (2 * mu1 ** 2)
            - j2(levy)) / exit_rate(p, noise)


def sigma_margin(p, noise):
    return _m(noise.sigma_beta) ** 2 - _m(p.mu1) * _m(p.beta) / _m(p.A)


def cond2_margin(p, noise, levy):
    return _m(p.beta) ** 2 / (2 * _m(noise.sigma_beta) ** 2) - exit_rate(p, noise) - j2(levy)


def persistence_bound(p, noise, levy):
    mu1, mu2, mu3, d, k = map(_m, (p.mu1, p.mu2, p.mu3, p.delta, p.k))
    w = mu2 / mu1 + d * mu3 / (mu1 * (mu3 + k))
    return exit_rate(p, noise) * (r0s(p, noise, levy) - 1) / (_m(p.beta) * w)


def endemic(p):
    """Endemic equilibrium by Newton iteration on the three drift equations."""
    A, mu1, mu2, mu3, b, d, gm, k = map(_m, (p.A, p.mu1, p.mu2, p.mu3, p.beta, p.delta,
                                              p.gamma, p.k))
    eqs = [
        lambda S, I, Q: A - mu1 * S - b * S * I + gm * I + k * Q,
        lambda S, I, Q: b * S * I - (mu2 + d + gm) * I,
        lambda S, I, Q: d * I - (mu3 + k) * Q,
    ]
    # Start on the I > 0 branch, away from the disease-free root.
    root = mp.findroot(eqs, (A / mu1 / 2, A / mu1 / 4, A / mu1 / 8))
    return tuple(root)


def rel_err(value, exact):
    exact = mp.mpf(exact)
    if exact == 0:
        return abs(mp.mpf(value))
    return abs((mp.mpf(value) - exact) / exact)
