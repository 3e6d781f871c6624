"""Empirical exponent fits and bound-check harnesses.

Each check walks a dyadic grid of scales X, computes the measured side
of an inequality with the sums machinery, divides by the predicted
envelope, and fits the log-log slope of that ratio against X.  A bound
that holds with the predicted exponent shows up as a ratio whose slope
is near zero or negative; slopes are compared against a per-theorem
threshold and the verdict is recorded rather than asserted, so a
failing configuration still produces a full report.

All grids, window lengths and sampling offsets are deterministic
functions of the config; the seed is carried through to reports for
reproducibility bookkeeping even though no check below draws random
numbers.
"""

import math
from dataclasses import dataclass, fields, replace

from .errors import (
    ConfigParseError,
    DegenerateInputError,
    DomainError,
    RangeError,
    WindowViolationError,
)
from .sums import ShiftedSumSpec, averaged_shifted_sum, fclass_stats

SLOPE_THRESHOLDS = {"main": 0.05, "gl3": 0.1, "weighted": 0.1}


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    residual_max: float


@dataclass(frozen=True)
class MembershipReport:
    b_hat: ExponentFit
    a2_hat: ExponentFit
    log_power: float
    rows: tuple


@dataclass(frozen=True)
class BoundRow:
    X: int
    H: int
    Q: float
    lhs: float
    rhs: float
    ratio: float
    alpha: float | None = None


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    config: "BoundCheckConfig"
    rows: tuple
    fit: ExponentFit | None
    slope_threshold: float
    verdict: str


def fit_exponent(points):
    """Least-squares slope of log y against log x.

    Points with nonpositive coordinates are rejected; at least three
    points with non-coincident x are required.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise DomainError("fit points must be strictly positive")
    if len(pts) < 3:
        raise DegenerateInputError(f"need >= 3 points, got {len(pts)}")
    lx = [math.log(x) for x, _ in pts]
    ly = [math.log(y) for _, y in pts]
    n = len(pts)
    mx = math.fsum(lx) / n
    my = math.fsum(ly) / n
    sxx = math.fsum((u - mx) ** 2 for u in lx)
    if sxx == 0.0:
        raise DegenerateInputError("all x values coincide")
    sxy = math.fsum((u - mx) * (v - my) for u, v in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = [v - (slope * u + intercept) for u, v in zip(lx, ly)]
    ss_res = math.fsum(r * r for r in resid)
    ss_tot = math.fsum((v - my) ** 2 for v in ly)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r2 = min(max(r2, 0.0), 1.0)
    return ExponentFit(slope=slope, intercept=intercept, r_squared=r2,
                       n_points=n, residual_max=max(abs(r) for r in resid))


def q_star(H, b1=2.0, b2=1.0):
    """Arc-order crossover H^(2 / (8 - (b1 + b2)))."""
    if H < 1:
        raise DomainError("H must be >= 1")
    if not (0.0 < b1 <= 2.0 and 0.0 < b2 <= 2.0):
        raise DomainError("variance exponents must lie in (0, 2]")
    return float(H) ** (2.0 / (8.0 - (b1 + b2)))


def fclass_membership(f, x_grid, a_rule=0.5, log_power=None):
    """Estimate the variance exponent pair of a table from window stats.

    For each X in the grid, window radii A = X**a_rule times
    {1, 2, 4, 8} are measured (those that fit the table); the pooled
    points (A, variance / (X log^p X)) give b_hat and the points
    (log X, second_moment / X) give a2_hat.
    """
    if not 0.0 < a_rule < 1.0:
        raise DomainError("a_rule must lie in (0, 1)")
    if log_power is None:
        log_power = 0.0
    rows = []
    b_points = []
    a2_points = []
    for X in sorted(set(int(x) for x in x_grid)):
        if X < 3:
            raise DomainError("grid scales must be >= 3")
        base = X ** a_rule
        for mult in (1.0, 2.0, 4.0, 8.0):
            A = base * mult
            if A < 1.0 or 2 * X + int(A) > f.n_max:
                continue
            st = fclass_stats(f, X, A)
            rows.append(st)
            b_points.append(
                (A, st.variance_integral / (X * math.log(X) ** log_power)))
        sm = fclass_stats(f, X, 1.0).second_moment
        a2_points.append((math.log(X), sm / X))
    b_hat = fit_exponent(b_points)
    a2_hat = fit_exponent(a2_points)
    return MembershipReport(b_hat=b_hat, a2_hat=a2_hat,
                            log_power=float(log_power), rows=tuple(rows))


# ----------------------------------------------------------------------
# bound-check configuration
# ----------------------------------------------------------------------

_THEOREMS = ("main", "gl3", "weighted")


@dataclass(frozen=True)
class BoundCheckConfig:
    theorem: str = "main"
    x_min_exp: int = 10
    x_max_exp: int = 14
    theta: float = 0.5
    b1: float = 2.0
    b2: float = 1.0
    a1: float = 2.0
    a2: float = 0.0
    weight: str = ""
    seed: int = 0

    def validate(self):
        if self.theorem not in _THEOREMS:
            raise DomainError(f"unknown theorem {self.theorem!r}")
        if not 2 <= self.x_min_exp <= self.x_max_exp <= 40:
            raise DomainError("need 2 <= x_min_exp <= x_max_exp <= 40")
        if not 0.1 <= self.theta <= 0.9:
            raise DomainError("theta must lie in [0.1, 0.9]")
        if not (0.0 < self.b1 <= 2.0 and 0.0 < self.b2 <= 2.0):
            raise DomainError("variance exponents must lie in (0, 2]")
        if self.weight not in ("", "gl2_lambda", "gl3_sym2"):
            raise DomainError(f"unknown weight kind {self.weight!r}")
        return self

    def x_grid(self):
        return [1 << e for e in range(self.x_min_exp, self.x_max_exp + 1)]

    def shift_count(self, X):
        return int(float(X) ** self.theta)


def dumps_config(cfg):
    return "".join(f"{f.name}={getattr(cfg, f.name)}\n"
                   for f in fields(BoundCheckConfig))


def loads_config(text):
    cfg = BoundCheckConfig()
    casts = {f.name: f.type for f in fields(BoundCheckConfig)}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, val = line.partition("=")
        key = key.strip()
        if not eq or key not in casts:
            raise ConfigParseError(f"line {ln}: bad config entry {raw!r}")
        val = val.strip()
        try:
            caster = casts[key] if casts[key] in (int, float) else str
            cfg = replace(cfg, **{key: caster(val)})
        except ValueError:
            raise ConfigParseError(f"line {ln}: bad value for {key}") from None
    return cfg


def write_config(cfg, path):
    with open(path, "w") as fh:
        fh.write(dumps_config(cfg))


def read_config(path):
    with open(path) as fh:
        return loads_config(fh.read())


# ----------------------------------------------------------------------
# bound checks
# ----------------------------------------------------------------------

def _finish(theorem, cfg, rows):
    threshold = SLOPE_THRESHOLDS[theorem]
    fit_pts = [(r.X, r.ratio) for r in rows if r.ratio > 0]
    if len(fit_pts) < 3:
        return BoundReport(theorem=theorem, config=cfg, rows=tuple(rows),
                           fit=None, slope_threshold=threshold,
                           verdict="insufficient-points")
    fit = fit_exponent(fit_pts)
    ok = (math.isfinite(fit.slope) and fit.slope <= threshold
          and all(math.isfinite(r.ratio) for r in rows)
          and all(r.alpha is None or 0.0 < r.alpha < 1.0 for r in rows))
    return BoundReport(theorem=theorem, config=cfg, rows=tuple(rows),
                       fit=fit, slope_threshold=threshold,
                       verdict="pass" if ok else "fail")


def check_theorem_main(cfg, f, g):
    """Shift-average of S(X, h; f, g) against H^(4/(8-b1-b2)) X log^c X."""
    cfg.validate()
    ex = 4.0 / (8.0 - (cfg.b1 + cfg.b2))
    logpow = max(cfg.a1, cfg.a2 + 1.0)
    rows = []
    for X in cfg.x_grid():
        H = cfg.shift_count(X)
        if H < 1:
            raise DomainError(f"theta={cfg.theta} gives empty shift range at X={X}")
        res = averaged_shifted_sum(ShiftedSumSpec(f=f, g=g, X=X, H=H))
        lhs = res.abs_aggregate
        rhs = float(H) ** ex * X * math.log(X) ** logpow
        rows.append(BoundRow(X=X, H=H, Q=q_star(H, cfg.b1, cfg.b2),
                             lhs=lhs, rhs=rhs, ratio=lhs / rhs))
    return _finish("main", cfg, rows)


def check_corollary_gl3(cfg, sym2, lam):
    """Averaged GL(3)xGL(2) sum against X^(10/9) H^(-5/9).

    The admissible window for the shift exponent is [0.35, 0.9];
    anything outside is rejected before any computation happens.
    """
    cfg.validate()
    if not 0.35 <= cfg.theta <= 0.9:
        raise WindowViolationError(
            f"theta={cfg.theta} outside the admissible window [0.35, 0.9]")
    if sym2.kind != "gl3_sym2":
        raise DomainError("first table must be a gl3_sym2 lift")
    rows = []
    for X in cfg.x_grid():
        H = cfg.shift_count(X)
        if H < 2:
            raise DomainError(f"shift range too small at X={X}")
        res = averaged_shifted_sum(ShiftedSumSpec(f=sym2, g=lam, X=X, H=H))
        lhs = res.abs_aggregate / H
        rhs = float(X) ** (10.0 / 9.0) * float(H) ** (-5.0 / 9.0)
        Q = float(X) ** (1.0 / 18.0) * float(H) ** (2.0 / 9.0)
        alpha = 2.5 * math.log(Q) / math.log(H)
        rows.append(BoundRow(X=X, H=H, Q=Q, lhs=lhs, rhs=rhs,
                             ratio=lhs / rhs, alpha=alpha))
    return _finish("gl3", cfg, rows)


def check_weighted(cfg, f, g, weight=None):
    """Weighted shift-average against X H^(1 - (1 - beta)/5) log^a2 X.

    beta is 1/2 for a gl2_lambda weight, 3/4 for a gl3_sym2 weight,
    and 1 when no weight is supplied (flat average sanity case).
    """
    cfg.validate()
    if weight is None:
        beta = 1.0
    elif weight.kind == "gl2_lambda":
        beta = 0.5
    elif weight.kind == "gl3_sym2":
        beta = 0.75
    else:
        raise DomainError(f"unsupported weight kind {weight.kind!r}")
    hexp = 1.0 - (1.0 - beta) / 5.0
    rows = []
    for X in cfg.x_grid():
        H = cfg.shift_count(X)
        if H < 1:
            raise DomainError(f"shift range too small at X={X}")
        if weight is not None and weight.n_max < H:
            raise RangeError(
                f"weight table reaches {weight.n_max}, need H={H}")
        res = averaged_shifted_sum(
            ShiftedSumSpec(f=f, g=g, X=X, H=H, weight=weight))
        lhs = res.abs_aggregate
        rhs = X * float(H) ** hexp * math.log(X) ** cfg.a2
        rows.append(BoundRow(X=X, H=H, Q=q_star(H, cfg.b1, cfg.b2),
                             lhs=lhs, rhs=rhs, ratio=lhs / rhs))
    return _finish("weighted", cfg, rows)
