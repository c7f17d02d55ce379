"""The differential-inequality pipeline.

Partial sums of connection probabilities, CI-aware checks of the
inequality theta' >= c (scale / Sigma) theta (1 - theta), exponential-decay
and linear-growth fits, and a validator that exercises the abstract lemma
(hypothesis implies decay below and linear growth above a transition point)
on synthetic families with known behaviour.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PercolabError


@dataclass
class SumTable:
    scales: np.ndarray     # n (discrete) or r (continuum)
    sums: np.ndarray       # Sigma at each scale
    stderrs: np.ndarray
    mode: str              # 'discrete' | 'continuum'


def partial_sums(thetas, stderrs=None, mode="discrete", scales=None):
    """Sigma_n = sum_{k<n} theta_k (discrete) or the trapezoid of theta_s.

    Discrete input is theta_k for k = 0..N-1 (theta_0 = 1 by convention if
    the caller passes it); continuum input needs an explicit r-grid.
    """
    thetas = np.asarray(thetas, dtype=float)
    stderrs = (np.zeros_like(thetas) if stderrs is None
               else np.asarray(stderrs, dtype=float))
    if mode == "discrete":
        n = len(thetas)
        sums = np.cumsum(thetas)
        errs = np.cumsum(stderrs)
        return SumTable(scales=np.arange(1, n + 1), sums=sums, stderrs=errs,
                        mode=mode)
    if mode != "continuum":
        raise ValueError("mode must be 'discrete' or 'continuum'")
    if scales is None:
        raise PercolabError("continuum sums need an explicit r-grid")
    r = np.asarray(scales, dtype=float)
    if len(r) != len(thetas):
        raise PercolabError("grid and curve lengths differ")
    dr = np.diff(r)
    mids = 0.5 * (thetas[1:] + thetas[:-1])
    sums = np.concatenate([[0.0], np.cumsum(mids * dr)])
    mid_err = 0.5 * (stderrs[1:] + stderrs[:-1])
    errs = np.concatenate([[0.0], np.cumsum(mid_err * dr)])
    return SumTable(scales=r, sums=sums, stderrs=errs, mode=mode)


@dataclass
class DiffCell:
    scale: float
    param: float           # p or lam
    theta: float
    sigma: float           # Sigma at this scale
    prime: float           # derivative estimate
    lhs: float             # derivative
    rhs: float             # c (scale / Sigma) theta (1 - theta)
    slack: float
    slack_stderr: float
    verdict: str           # PASS | FAIL | INCONCLUSIVE


def _cell_verdict(slack, slack_se):
    if slack >= 0.0:
        return "PASS"
    if slack + 4.0 * slack_se >= 0.0:
        return "INCONCLUSIVE"
    return "FAIL"


def check_differential_inequality(d, n_list, p_grid, c, replicas, seed, h=0.01):
    """MC check of theta_n' >= c (n / Sigma_n) theta_n (1 - theta_n).

    Uses one coupled uniform stream per box so that theta values at p and
    p +- h subtract to a Bernoulli difference with exact binomial stderr.
    """
    from .bernoulli import _count_theta
    from .lattice import build_box_graph

    n_list = sorted(set(int(n) for n in n_list))
    p_grid = sorted(float(p) for p in p_grid)
    n_max = max(n_list)
    ps_center = list(p_grid)
    ps_shift = sorted({q for p in p_grid for q in (p - h, p + h)})

    # theta table for Sigma: every radius 1..n_max at every center p
    theta = {}
    theta_se = {}
    for n in range(1, n_max + 1):
        g = build_box_graph(d, n)
        need = ps_center if n not in n_list else sorted(set(ps_center + ps_shift))
        counts = _count_theta(g, need, replicas, seed)
        for p, cnt in zip(need, counts):
            est = cnt / replicas
            theta[(n, p)] = est
            theta_se[(n, p)] = float(np.sqrt(est * (1 - est) / replicas))

    cells = []
    for n in n_list:
        for p in p_grid:
            sigma = 1.0 + sum(theta[(k, p)] for k in range(1, n))
            sigma_se = float(np.sqrt(sum(theta_se[(k, p)] ** 2
                                         for k in range(1, n))))
            q = max(theta[(n, p + h)] - theta[(n, p - h)], 0.0)
            prime = q / (2 * h)
            prime_se = float(np.sqrt(q * (1 - q) / replicas)) / (2 * h)
            th = theta[(n, p)]
            th_se = theta_se[(n, p)]
            rhs = c * (n / sigma) * th * (1.0 - th)
            slack = prime - rhs
            drhs_dth = c * (n / sigma) * abs(1.0 - 2.0 * th)
            drhs_dsig = rhs / sigma
            slack_se = float(np.sqrt(prime_se**2 + (drhs_dth * th_se) ** 2
                                     + (drhs_dsig * sigma_se) ** 2))
            cells.append(DiffCell(scale=n, param=p, theta=th, sigma=sigma,
                                  prime=prime, lhs=prime, rhs=rhs, slack=slack,
                                  slack_stderr=slack_se,
                                  verdict=_cell_verdict(slack, slack_se)))
    return cells


def check_differential_inequality_continuum(lam_grid, thetas, stderrs, sums,
                                            c, scale_r, lambda_hat):
    """Same check on a continuum theta_r(lam) table, gated at lam >= lambda_hat.

    thetas/stderrs are indexed by the lam grid at one fixed r; derivatives
    are centered differences on the grid.
    """
    lam_grid = np.asarray(lam_grid, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    sums = np.asarray(sums, dtype=float)
    cells = []
    for i in range(1, len(lam_grid) - 1):
        lam = lam_grid[i]
        if lam < lambda_hat:
            continue
        dl = lam_grid[i + 1] - lam_grid[i - 1]
        prime = (thetas[i + 1] - thetas[i - 1]) / dl
        prime_se = float(np.sqrt(stderrs[i + 1] ** 2 + stderrs[i - 1] ** 2)) / dl
        th = thetas[i]
        rhs = c * (scale_r / sums[i]) * th * (1.0 - th)
        slack = prime - rhs
        drhs = c * (scale_r / sums[i]) * abs(1.0 - 2.0 * th)
        slack_se = float(np.sqrt(prime_se**2 + (drhs * stderrs[i]) ** 2))
        cells.append(DiffCell(scale=scale_r, param=float(lam), theta=float(th),
                              sigma=float(sums[i]), prime=float(prime),
                              lhs=float(prime), rhs=float(rhs),
                              slack=float(slack), slack_stderr=slack_se,
                              verdict=_cell_verdict(slack, slack_se)))
    return cells


@dataclass
class FitResult:
    kind: str              # 'decay' | 'growth'
    slope: float
    intercept: float
    r2: float
    slope_stderr: float
    rate: float            # c_p (decay) or envelope c (growth)
    rate_low: float        # conservative lower value of the rate
    flags: tuple = field(default_factory=tuple)


#: a decay fit is flagged NOT-DECAYING when even the 4-sigma-pessimistic
#: slope fails to clear this (slightly negative) floor
NOT_DECAYING_FLOOR = -0.01


def fit_exponential_decay(n_list, thetas, stderrs=None):
    """Least squares of log theta_n against n; rate c_p = -slope."""
    n = np.asarray(n_list, dtype=float)
    th = np.asarray(thetas, dtype=float)
    se = np.zeros_like(th) if stderrs is None else np.asarray(stderrs, float)
    flags = []
    pos = th > 0
    if not pos.all():
        flags.append("ZERO-ESTIMATES-DROPPED")  # slope is then a lower bound
    n, th, se = n[pos], th[pos], se[pos]
    if len(n) < 2:
        raise PercolabError("too few positive points for a decay fit")
    y = np.log(th)
    coeffs, residuals, *_ = np.polyfit(n, y, 1, full=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    pred = slope * n + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = max(len(n) - 2, 1)
    sxx = float(((n - n.mean()) ** 2).sum())
    slope_se = float(np.sqrt((ss_res / dof) / sxx)) if sxx > 0 else 0.0
    # fold in the statistical error of the inputs (delta method on log)
    stat_se = float(np.sqrt(((se / np.maximum(th, 1e-300)) ** 2).sum()) /
                    max(np.sqrt(sxx), 1e-300))
    slope_se = float(np.hypot(slope_se, stat_se))
    if slope + 4.0 * slope_se >= NOT_DECAYING_FLOOR:
        flags.append("NOT-DECAYING")
    return FitResult(kind="decay", slope=slope, intercept=intercept, r2=r2,
                     slope_stderr=slope_se, rate=-slope,
                     rate_low=-(slope + 4.0 * slope_se), flags=tuple(flags))


def fit_linear_growth(p_list, thetas, stderrs, pc):
    """One-sided envelope theta >= c (p - pc): the largest c every point
    clears after a 4-sigma allowance, with a conservative lower companion."""
    p = np.asarray(p_list, dtype=float)
    th = np.asarray(thetas, dtype=float)
    se = np.asarray(stderrs, dtype=float)
    above = p > pc
    if above.sum() < 3:
        raise PercolabError("need at least 3 points above the critical estimate")
    p, th, se = p[above], th[above], se[above]
    flags = []
    if np.all(th == 0):
        flags.append("ALL-ZERO-INPUT")
        return FitResult(kind="growth", slope=0.0, intercept=0.0, r2=float("nan"),
                         slope_stderr=0.0, rate=0.0, rate_low=0.0,
                         flags=tuple(flags))
    c = float(np.min((th + 4.0 * se) / (p - pc)))
    c_low = float(np.min((th - 4.0 * se) / (p - pc)))
    return FitResult(kind="growth", slope=c, intercept=-c * pc, r2=float("nan"),
                     slope_stderr=(c - c_low) / 8.0, rate=c, rate_low=c_low,
                     flags=tuple(flags))


# ---------------------------------------------------------------------------
# synthetic validator for the abstract lemma

def tilted_ramp_family(pc=0.5, base=0.2, tilt=0.6):
    """f_n(p) = (base + tilt p) min(1, e^{n (p - pc)}).

    Satisfies f_n' >= c (n / Sigma_n) f_n for small c: below the cap the
    logarithmic derivative is at least n, and in the cap region both sides
    reduce to tilt >= c.  Decays exponentially below pc and converges to an
    affine positive profile above it.
    """

    def f(n, p):
        return (base + tilt * p) * np.minimum(1.0, np.exp(n * (p - pc)))

    def fprime(n, p):
        ramp = np.exp(n * (p - pc))
        below = ramp < 1.0
        return np.where(
            below,
            tilt * ramp + (base + tilt * p) * n * ramp,
            tilt,
        )

    return f, fprime


def constant_family():
    """The degenerate family f_n = 1 (hypothesis holds with f' = 0 >= 0 only
    for c = 0; used for the beta_c = 0 edge case)."""

    def f(n, p):
        return np.ones_like(np.asarray(p, dtype=float))

    def fprime(n, p):
        return np.zeros_like(np.asarray(p, dtype=float))

    return f, fprime


@dataclass
class LemmaReport:
    hypothesis_ok: bool
    beta_interval: tuple   # (lo, hi) bracketing the located transition
    decay_ok: bool
    growth_ok: bool
    growth_rate: float
    passed: bool


def validate_lemma_family(f, fprime, c, n_max=40, p_grid=None,
                          require_hypothesis=True, margin=0.05):
    """Check the lemma's conclusions on a synthetic family.

    Locates beta_c as the first grid point where log Sigma_n / log n (at the
    largest ladder rung) reaches 1 within tolerance, then verifies
    exponential decay below and a positive linear envelope above.
    """
    if p_grid is None:
        p_grid = np.round(np.arange(0.0, 1.0001, 0.01), 10)
    p_grid = np.asarray(p_grid, dtype=float)
    ns = np.arange(0, n_max + 1)

    # table f_n(p) and Sigma_n(p) = sum_{k<n} f_k(p)
    table = np.array([f(n, p_grid) for n in ns])  # (n_max+1, P)
    sums = np.cumsum(table, axis=0)               # Sigma_{n+1} at row n

    hypothesis_ok = True
    if require_hypothesis:
        for i, n in enumerate(ns[1:], start=1):
            lhs = fprime(n, p_grid)
            rhs = c * (n / sums[i - 1]) * table[i]
            if np.any(lhs + 1e-9 < rhs):
                hypothesis_ok = False
        if not hypothesis_ok:
            raise PercolabError(
                "synthetic family violates the hypothesis f' >= c (n/Sigma) f"
            )

    # transition point: limsup proxy is the log-log slope of Sigma_n between
    # the top two rungs (exactly 1 for linear growth, < 1 once Sigma saturates)
    half = (n_max + 1) // 2
    ratio = (np.log(np.maximum(sums[-1], 1e-300))
             - np.log(np.maximum(sums[half - 1], 1e-300))) / np.log(
        (n_max + 1) / half
    )
    hit = ratio >= 0.95
    if hit.all():
        beta_interval = (float(p_grid[0]), float(p_grid[0]))
        lo_i = 0
    elif not hit.any():
        raise PercolabError("no transition located on the grid")
    else:
        lo_i = int(np.argmax(hit))
        beta_interval = (float(p_grid[max(lo_i - 1, 0)]), float(p_grid[lo_i]))

    beta = beta_interval[1]
    # decay below the transition
    decay_ok = True
    below = p_grid[p_grid <= beta - margin]
    if below.size:
        p_test = below[len(below) // 2]
        ladder = np.arange(max(4, n_max // 4), n_max + 1)
        fit = fit_exponential_decay(ladder, f(ladder, p_test))
        decay_ok = fit.slope < -1e-6 and fit.r2 > 0.9
    # linear growth above
    growth_ok = True
    growth_rate = float("nan")
    above = p_grid[p_grid >= beta + margin]
    if above.size >= 3:
        vals = f(n_max, above)
        fit = fit_linear_growth(above, vals, np.zeros_like(vals), beta)
        growth_rate = fit.rate_low
        growth_ok = fit.rate_low > 0.0
    passed = hypothesis_ok and decay_ok and growth_ok
    return LemmaReport(hypothesis_ok=hypothesis_ok, beta_interval=beta_interval,
                       decay_ok=decay_ok, growth_ok=growth_ok,
                       growth_rate=growth_rate, passed=passed)
