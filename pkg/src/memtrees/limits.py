"""Limit objects the simulations are checked against.

Height constants for the fractional-window regime are computed along two
fully independent numerical routes and must agree:

* ``kappa``: the first-birth constant of the embedded branching process,
  from phi (Laplace transform of the birth intensity), mu_of (its tilted
  infimum) and a monotone bisection;
* ``alpha_max``: the depth-rate constant of scaled attachment, from the
  log-moment function of the attachment variable, its Legendre transform and
  a bracketing root find.

The product kappa * alpha_max equals 1; both pipelines solve different
equations, so the identity is a real cross-check.

Also here: the fluid limit of the ancestor-label chain, the limiting degree
pmf of the fractional-window regime (quadrature), reference samplers for all
three fringe laws (finite-horizon branching process, SARRT intensity via
thinning, critical Poisson Galton-Watson), the coalescence-height law of the
critical window regime, and window-exposure diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import rng as _rng
from .analysis import TRUNCATED_MARKER, FringeTree, Truncated, code_from_children


class SolverError(RuntimeError):
    """A numerical routine failed to bracket or converge; message has diagnostics."""


class EnvelopeViolationError(RuntimeError):
    """Thinning envelope was exceeded by the supplied density."""


# ---------------------------------------------------------------------------
# fluid limit of the ancestor-label chain


def f_beta(beta: float, t: float) -> float:
    """Normalized label of the ancestor chain after t*n**(1-beta) steps.

    Solves f' = -f**beta / 2, f(0) = 1; hits zero at t = 2/(1-beta) and
    stays there.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0,1), got {beta}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    slope = (1.0 - beta) / 2.0
    base = 1.0 - slope * t
    if base <= 0.0:
        return 0.0
    return base ** (1.0 / (1.0 - beta))


def chain_absorption_time(beta: float) -> float:
    """Scaled time at which the chain fluid limit reaches the root: 2/(1-beta)."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0,1), got {beta}")
    return 2.0 / (1.0 - beta)


# ---------------------------------------------------------------------------
# first-birth route to the height constant


def c_theta(theta: float) -> float:
    """Age cutoff log(1/theta) of the birth window."""
    _check_theta(theta)
    return math.log(1.0 / theta)


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0,1), got {theta}")


def phi(theta: float, lam: float) -> float:
    """(1 - theta**lam) / (lam * (1 - theta)); mean points seen under an
    exponential(lam) horizon, equal to 1 at lam = 1."""
    _check_theta(theta)
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    return -math.expm1(lam * math.log(theta)) / (lam * (1.0 - theta))


def _log_tilted(theta: float, a: float, lam: float) -> float:
    """log( phi(lam) * exp(lam * a) ), computed in log space."""
    return (
        math.log(-math.expm1(lam * math.log(theta)))
        - math.log(lam)
        - math.log(1.0 - theta)
        + lam * a
    )


def _ternary_min(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def mu_of(theta: float, a: float, inner_tol: float = 1e-12) -> float:
    """inf over lam > 1 of phi(lam) * exp(lam * a).

    The objective is smooth and unimodal; the bracket grows geometrically
    until it has been increasing for three consecutive probes, then a ternary
    search pins the minimizer.
    """
    _check_theta(theta)
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a}")
    g = lambda lam: _log_tilted(theta, a, lam)
    lo = 1.0 + 1e-12
    hi = 2.0
    best = min(g(lo), g(hi))
    rises = 0
    prev = g(hi)
    while rises < 3:
        hi *= 2.0
        if hi > 1e9:
            # objective still falling: infimum indistinguishable from the tail
            return math.exp(best)
        val = g(hi)
        best = min(best, val)
        rises = rises + 1 if val > prev else 0
        prev = val
    lam_star = _ternary_min(g, lo, hi, inner_tol * max(1.0, hi))
    return math.exp(min(best, g(lam_star)))


def kappa(theta: float, tol: float = 1e-9) -> float:
    """sup{a : mu_of(theta, a) < 1}, by bisection (mu is non-decreasing in a)."""
    _check_theta(theta)
    if tol <= 0:
        raise ValueError("tol must be > 0")
    lo, hi = 0.0, c_theta(theta)
    if mu_of(theta, hi) < 1.0:
        raise SolverError(f"kappa bracket failed: mu({hi}) < 1 for theta={theta}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mu_of(theta, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Legendre route to the same constant


def mu_drift(theta: float) -> float:
    """E[-log X] for X uniform on [theta, 1]: (1 - theta + theta log theta)/(1 - theta)."""
    _check_theta(theta)
    return (1.0 - theta + theta * math.log(theta)) / (1.0 - theta)


def _g_and_ratio(theta: float, u: float) -> tuple[float, float]:
    """g(u) = (1 - exp(-u*c)) / u (the moment integral at lam = u - 1, up to
    normalization) and g'(u)/g(u), stable through the removable point u = 0."""
    c = c_theta(theta)
    if abs(u) < 1e-6:
        # series around u = 0
        g = c * (1.0 - u * c / 2.0 + (u * c) ** 2 / 6.0)
        ratio = (-c / 2.0 + u * c * c / 3.0) / (1.0 - u * c / 2.0 + (u * c) ** 2 / 6.0)
        return g, ratio
    e = math.exp(-u * c)
    g = -math.expm1(-u * c) / u
    gp = (c * e * u + e - 1.0) / (u * u)
    return g, gp / g


def lambda_mgf(theta: float, lam: float) -> float:
    """log E[X**lam] for X uniform on [theta, 1]."""
    _check_theta(theta)
    g, _ = _g_and_ratio(theta, lam + 1.0)
    return math.log(g) - math.log(1.0 - theta)


def _mgf_slope(theta: float, lam: float) -> float:
    """d/dlam log E[X**lam]; increasing, with range (log theta, 0)."""
    _, ratio = _g_and_ratio(theta, lam + 1.0)
    return ratio


def legendre(theta: float, z: float, tol: float = 1e-12) -> float:
    """sup over lam of (lam * z - log E[X**lam]), for z in (log theta, 0).

    Solved by root-finding the stationarity condition on the increasing slope
    of the log-moment function.
    """
    _check_theta(theta)
    if not -c_theta(theta) < z < 0.0:
        raise ValueError(f"z={z} outside (log theta, 0) = ({-c_theta(theta)}, 0)")
    lo, hi = -1.0, 1.0
    grew = 0
    while _mgf_slope(theta, lo) > z:
        lo *= 2.0
        grew += 1
        if grew > 200:
            raise SolverError(f"legendre bracket failed on the left: z={z}, scanned down to {lo}")
    grew = 0
    while _mgf_slope(theta, hi) < z:
        hi *= 2.0
        grew += 1
        if grew > 200:
            raise SolverError(f"legendre bracket failed on the right: z={z}, scanned up to {hi}")
    lam_star = brentq(lambda lam: _mgf_slope(theta, lam) - z, lo, hi, xtol=tol)
    return lam_star * z - lambda_mgf(theta, lam_star)


def psi(theta: float, cc: float) -> float:
    """c * Legendre(-1/c); crosses 1 at the inverse height constant."""
    return cc * legendre(theta, -1.0 / cc)


def alpha_max(theta: float, tol: float = 1e-9) -> float:
    """Smallest c > 1/mu_drift with psi(c) > 1, by bracketing + bisection."""
    _check_theta(theta)
    lo = 1.0 / mu_drift(theta) * (1.0 + 1e-9)
    hi = lo * 2.0
    scanned = [lo]
    while psi(theta, hi) <= 1.0:
        lo = hi
        hi *= 2.0
        scanned.append(hi)
        if hi > 1e9:
            raise SolverError(f"alpha_max bracket failed for theta={theta}: scanned {scanned}")
    return brentq(lambda cc: psi(theta, cc) - 1.0, lo, hi, xtol=tol)


@dataclass(frozen=True)
class HeightConstants:
    """Both height-constant routes for one theta, with the duality residual."""

    theta: float
    kappa: float
    alpha_max: float
    mu_drift: float
    c_theta: float
    solver_tolerance: float

    @property
    def duality_gap(self) -> float:
        return abs(self.kappa * self.alpha_max - 1.0)


def height_constants(theta: float, tol: float = 1e-9) -> HeightConstants:
    return HeightConstants(
        theta=theta,
        kappa=kappa(theta, tol),
        alpha_max=alpha_max(theta, tol),
        mu_drift=mu_drift(theta),
        c_theta=c_theta(theta),
        solver_tolerance=tol,
    )


# ---------------------------------------------------------------------------
# limiting degree pmf, fractional-window regime


def _poisson_pmf(mean: float, k: int) -> float:
    if mean < 0 or k < 0:
        return 0.0
    if mean == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mean) - mean - math.lgamma(k + 1))


def _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(f, a, m, tol / 2.0, fa, flm, fm, left, depth - 1) + _adaptive_simpson(
        f, m, b, tol / 2.0, fm, frm, fb, right, depth - 1
    )


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _adaptive_simpson(f, a, b, tol, fa, fm, fb, whole, 50)


def macro_degree_pmf(theta: float, k: int, quad_tol: float = 1e-10) -> float:
    """Limiting fraction of degree-k vertices in the fractional-window regime.

    Integrates a Poisson count of rate 1/(1-theta) over an exponential
    observation horizon, with the constant-rate tail beyond the age cutoff
    taken in closed form.
    """
    _check_theta(theta)
    if k < 1:
        raise ValueError(f"degree k must be >= 1, got {k}")
    j = k - 1
    r = 1.0 / (1.0 - theta)
    c = c_theta(theta)
    body = adaptive_simpson(lambda t: math.exp(-t) * _poisson_pmf(r * t, j), 0.0, c, quad_tol)
    tail = math.exp(-c) * _poisson_pmf(r * c, j)
    return body + tail


def macro_degree_pmf_table(theta: float, k_max: int, quad_tol: float = 1e-10) -> np.ndarray:
    """pmf values for degrees 1..k_max (index 0 unused)."""
    out = np.zeros(k_max + 1)
    for k in range(1, k_max + 1):
        out[k] = macro_degree_pmf(theta, k, quad_tol)
    return out


# ---------------------------------------------------------------------------
# reference fringe samplers


def _genealogy_to_fringe(children: list[list[int]], size_cap: int) -> FringeTree | Truncated:
    if len(children) > size_cap:
        return TRUNCATED_MARKER
    code = code_from_children(0, lambda v: children[v], size_cap)
    return TRUNCATED_MARKER if code is None else FringeTree.from_code(code)


def sample_macro_fringe(
    theta: float, seed: int, size_cap: int, horizon: float | None = None
) -> FringeTree | Truncated:
    """One draw from the limiting fringe law of the fractional-window regime.

    Grows the finite-horizon branching process: each individual produces
    births at rate 1/(1-theta) over its age window [0, age cutoff], clipped to
    an independent exponential(1) observation horizon.  ``horizon`` overrides
    the exponential draw (unit-test hook).
    """
    _check_theta(theta)
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    gen = _rng.stream(seed)
    t1 = float(gen.exponential()) if horizon is None else float(horizon)
    rate = 1.0 / (1.0 - theta)
    cut = c_theta(theta)

    birth = [0.0]
    children: list[list[int]] = [[]]
    queue = [0]
    while queue:
        v = queue.pop()
        open_len = min(cut, t1 - birth[v])
        if open_len <= 0.0:
            continue
        n_births = int(gen.poisson(rate * open_len))
        if n_births:
            ages = gen.random(n_births) * open_len
            for a in ages:
                w = len(birth)
                if w >= size_cap:
                    return TRUNCATED_MARKER
                birth.append(birth[v] + float(a))
                children.append([])
                children[v].append(w)
                queue.append(w)
    return _genealogy_to_fringe(children, size_cap)


def sample_sarrt_fringe(
    density: Callable[[float], float],
    seed: int,
    size_cap: int,
    envelope: float,
    horizon: float | None = None,
) -> FringeTree | Truncated:
    """Fringe draw for scaled attachment with attachment density ``density``.

    The birth intensity at age x is density(exp(-x)); births are generated by
    thinning a homogeneous process at the ``envelope`` rate, which must bound
    the density on [0, 1] (violations abort with diagnostics).
    """
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    if envelope <= 0:
        raise ValueError("envelope must be > 0")
    gen = _rng.stream(seed)
    t1 = float(gen.exponential()) if horizon is None else float(horizon)

    birth = [0.0]
    children: list[list[int]] = [[]]
    queue = [0]
    while queue:
        v = queue.pop()
        open_len = t1 - birth[v]
        if open_len <= 0.0:
            continue
        n_cand = int(gen.poisson(envelope * open_len))
        if n_cand:
            xs = gen.random(n_cand) * open_len
            us = gen.random(n_cand)
            for x, u in zip(xs, us):
                lam = float(density(math.exp(-x)))
                if lam > envelope * (1.0 + 1e-12):
                    raise EnvelopeViolationError(
                        f"density({math.exp(-x):.6g}) = {lam:.6g} exceeds envelope {envelope:.6g}"
                    )
                if u * envelope < lam:
                    w = len(birth)
                    if w >= size_cap:
                        return TRUNCATED_MARKER
                    birth.append(birth[v] + float(x))
                    children.append([])
                    children[v].append(w)
                    queue.append(w)
    return _genealogy_to_fringe(children, size_cap)


def uniform_density(lo: float, hi: float) -> tuple[Callable[[float], float], float]:
    """Density of U[lo, hi] on [0,1] plus its tight thinning envelope."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("need 0 <= lo < hi <= 1")
    h = 1.0 / (hi - lo)

    def dens(x: float) -> float:
        return h if lo <= x <= hi else 0.0

    return dens, h


def sample_poisson_gw(seed: int, size_cap: int) -> FringeTree | Truncated:
    """Critical Galton-Watson tree with Poisson(1) offspring, breadth first."""
    from collections import deque

    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    gen = _rng.stream(seed)
    children: list[list[int]] = [[]]
    queue = deque([0])
    while queue:
        v = queue.popleft()
        k = int(gen.poisson(1.0))
        for _ in range(k):
            w = len(children)
            if w >= size_cap:
                return TRUNCATED_MARKER
            children.append([])
            children[v].append(w)
            queue.append(w)
    return _genealogy_to_fringe(children, size_cap)


def poisson_gw_shape_pmf(size_cap: int) -> dict[str, float]:
    """Exact Poisson(1) Galton-Watson probability of every shape of size <= cap.

    P(shape) = e**-1 * prod_i P(child shape_i)**m_i / m_i! over the multiset
    of child shapes; the remaining mass (total progeny > cap) goes under the
    truncated key.
    """
    from collections import Counter

    from .analysis import TRUNCATED

    by_size: dict[int, dict[str, float]] = {1: {"()": math.exp(-1.0)}}
    probs: dict[str, float] = {"()": math.exp(-1.0)}
    for size in range(2, size_cap + 1):
        level: dict[str, float] = {}
        # partition size-1 among children drawn from smaller shapes
        smaller = [(code, p, code.count("(")) for code, p in probs.items()]

        def rec(start: int, remaining: int, parts: list[tuple[str, float]]):
            if remaining == 0:
                mult: Counter = Counter(c for c, _ in parts)
                prob = math.exp(-1.0)
                for c, p in parts:
                    prob *= p
                for m in mult.values():
                    prob /= math.factorial(m)
                code = "(" + "".join(sorted(c for c, _ in parts)) + ")"
                level[code] = level.get(code, 0.0) + prob
                return
            for i in range(start, len(smaller)):
                code, p, sz = smaller[i]
                if sz <= remaining:
                    rec(i, remaining - sz, parts + [(code, p)])

        rec(0, size - 1, [])
        by_size[size] = level
        probs.update(level)
    out = dict(probs)
    out[TRUNCATED] = 1.0 - sum(probs.values())
    return out


# ---------------------------------------------------------------------------
# coalescence-height law in the critical window regime


@dataclass(frozen=True)
class BranchpointLaw:
    """Recursive power-of-uniform law of scaled branchpoint heights."""

    k: int
    exponents: tuple[float, ...]  # for levels k down to 2

    @classmethod
    def for_leaves(cls, k: int) -> "BranchpointLaw":
        if k < 2:
            raise ValueError("need k >= 2 leaves")
        return cls(k, tuple(1.0 / (4.0 * l * (l - 1)) for l in range(k, 1, -1)))


def branchpoint_sample(k: int, seed: int) -> np.ndarray:
    """One draw of the k-1 scaled branchpoint heights (increasing order).

    The top height is U**(1/(4k(k-1))); each next height multiplies by an
    independent uniform raised to 1/(4l(l-1)) for l = k-1, ..., 2.
    """
    law = BranchpointLaw.for_leaves(k)
    gen = _rng.stream(seed)
    xs = np.empty(k - 1)
    x = 1.0
    for i, expo in enumerate(law.exponents):
        x *= float(gen.random()) ** expo
        xs[k - 2 - i] = x
    return xs


def branchpoint_cdf(k: int, level: int, x: float) -> float:
    """P(X_level <= x) for the height of branchpoint ``level`` (1-based).

    -log X_level is a sum of independent exponentials with distinct rates
    4l(l-1), l = level+1..k, so the cdf is a rate-weighted power mix; at the
    top level it reduces to x**(4k(k-1)).
    """
    if k < 2 or not 1 <= level <= k - 1:
        raise ValueError(f"need k >= 2 and 1 <= level <= k-1, got k={k}, level={level}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    rates = [4.0 * l * (l - 1) for l in range(level + 1, k + 1)]
    total = 0.0
    for i, ri in enumerate(rates):
        w = 1.0
        for jj, rj in enumerate(rates):
            if jj != i:
                w *= rj / (rj - ri)
        total += w * x**ri
    return float(total)


# ---------------------------------------------------------------------------
# window-exposure diagnostics


def n_j_count(j: int, beta: float) -> int:
    """Number of arrivals i >= j whose window reaches back to j:
    |{i >= j : i - i**beta <= j}|, by direct scan (i - i**beta is increasing)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0,1), got {beta}")
    count = 0
    i = j
    bound = int(2 * j**beta + j + 2)
    while i <= bound:
        if i - i**beta <= j:
            count += 1
            i += 1
        else:
            break
    return count


def poisson_tv_bound(j: int, n: int, beta: float, eps: float) -> float:
    """Diagnostic bound on d_TV(degree of vertex j at time n, Poisson(1)).

    Valid for eps > 1 and j large; the last term only bites when vertex j has
    not yet seen all arrivals that could reach it.
    """
    if eps <= 1.0:
        raise ValueError("eps must be > 1")
    nj = n_j_count(j, beta)
    jb = float(j) ** beta
    term1 = eps * (1.0 - (1.0 + eps * j ** (beta - 1.0)) ** (-beta))
    term2 = eps / jb
    term3 = max(eps - 1.0, 1.0 / jb)
    term4 = abs((n - j) / jb - 1.0) if nj >= n - j else 0.0
    return term1 + term2 + term3 + term4


def constants_table(thetas: Sequence[float], tol: float = 1e-9) -> list[HeightConstants]:
    """Height constants over a theta grid (both routes per entry)."""
    return [height_constants(th, tol) for th in thetas]
