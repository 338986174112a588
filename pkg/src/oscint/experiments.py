"""Ensemble experiments: uniformity in the degree, full-polynomial growth,
the dependence on d, and the structural property battery.

Every draw carries its own integer seed, derived from the run seed with
numpy's SeedSequence, and a draw is rebuilt from that seed alone with a
Philox (counter-based) generator.  Results are sorted by seed, so output
does not depend on worker scheduling.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .decomposition import (
    IntegerInterval,
    bad_set_0,
    bad_set_1,
    default_window,
    gamma_min,
    good_components,
    good_intervals,
    verify_domination,
)
from .errors import InvalidDimensions, OscintError, ToleranceNotMet
from .fewnomial import Fewnomial, make_fewnomial, scale_frame
from .quadrature import GridSpec, default_grid, multiplier_sup, pv_multiplier

__all__ = [
    "SweepRecord",
    "GroupStats",
    "GrowthSummary",
    "PropertyReport",
    "derive_seed",
    "sample_fewnomial",
    "draw_coefficients",
    "uniformity_sweep",
    "parissis_growth",
    "logd_scan",
    "summarize",
    "structure_suite",
    "replay_failure",
    "tie_instance",
    "brute_force_bad_set",
    "records_to_csv",
    "resolve_threads",
    "covers_pieces",
    "good_piece_instances",
]

CSV_COLUMNS = [
    "seed", "d", "n", "exponents", "coeff_decades",
    "sup", "argmax_xi", "certified_fraction", "wall_time",
]
MIN_GROUP = 20


# -- seeds and draws ---------------------------------------------------------


def derive_seed(seed: int, *keys: int) -> int:
    """63-bit seed for one draw, a pure function of (seed, keys)."""
    words = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(2, np.uint32)
    return int((int(words[0]) << 31) ^ int(words[1]))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def draw_coefficients(rng: np.random.Generator, d: int, coeff_decades: float) -> np.ndarray:
    """Random signs, log10|a| uniform on [-coeff_decades/2, coeff_decades/2]."""
    signs = rng.choice([-1.0, 1.0], size=d)
    logs = rng.uniform(-coeff_decades / 2, coeff_decades / 2, size=d)
    return signs * 10.0**logs


def sample_fewnomial(seed: int, d: int, max_exp: int, coeff_decades: float) -> Fewnomial:
    """d distinct exponents uniform in {2..max_exp} and log-uniform coefficients."""
    if not (1 <= d <= max_exp - 1):
        raise InvalidDimensions(f"need 1 <= d <= max_exp - 1, got d={d}, max_exp={max_exp}")
    if not coeff_decades > 0:
        raise InvalidDimensions("coeff_decades must be positive")
    rng = _rng(seed)
    exps = np.sort(rng.choice(np.arange(2, max_exp + 1), size=d, replace=False))
    return make_fewnomial(draw_coefficients(rng, d, coeff_decades), exps.tolist())


def _with_exponents(seed: int, exponents: Sequence[int], coeff_decades: float) -> Fewnomial:
    return make_fewnomial(draw_coefficients(_rng(seed), len(exponents), coeff_decades), exponents)


# -- records -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    seed: int
    d: int
    exponents: tuple
    coeff_decades: float
    sup: float
    argmax_xi: float
    certified_fraction: float
    wall_time: float = 0.0

    @property
    def n(self) -> int:
        return self.exponents[-1]

    def row(self, timing: bool = True) -> list:
        return [
            self.seed, self.d, self.n, ";".join(map(str, self.exponents)),
            repr(self.coeff_decades), repr(self.sup), repr(self.argmax_xi),
            repr(self.certified_fraction),
            f"{self.wall_time:.3f}" if timing else "",
        ]


def records_to_csv(records: Sequence[SweepRecord], timing: bool = True) -> str:
    """CSV text; with timing=False the wall_time column is left empty so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(timing))
    return buf.getvalue()


@dataclass(frozen=True)
class _Task:
    seed: int
    exponents: tuple
    coeff_decades: float
    grid: Optional[GridSpec]
    tol: float
    at_zero: bool


def _run_task(task: _Task) -> SweepRecord:
    start = time.perf_counter()
    Q = _with_exponents(task.seed, task.exponents, task.coeff_decades)
    if task.at_zero:
        try:
            s = pv_multiplier(Q, 0.0, task.tol)
            sup, arg, cert = abs(s.value), 0.0, 1.0
        except (ToleranceNotMet, OscintError):
            sup, arg, cert = math.nan, 0.0, 0.0
    else:
        try:
            res = multiplier_sup(Q, task.grid or default_grid(Q), task.tol)
            sup, arg, cert = res.sup, res.argmax_xi, res.certified_fraction
        except OscintError:
            sup, arg, cert = math.nan, math.nan, 0.0
    return SweepRecord(
        task.seed, len(task.exponents), tuple(task.exponents), task.coeff_decades,
        float(sup), float(arg), float(cert), time.perf_counter() - start,
    )


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("OSCINT_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _map(tasks: List[_Task], threads: Optional[int]) -> List[SweepRecord]:
    threads = resolve_threads(threads)
    if threads == 1 or len(tasks) < 2:
        out = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * threads))))
    return sorted(out, key=lambda r: r.seed)


# -- summaries ---------------------------------------------------------------


@dataclass(frozen=True)
class GroupStats:
    key: int
    count: int
    max_sup: float
    median_sup: float


@dataclass(frozen=True)
class GrowthSummary:
    """Per-group statistics and the trend of max_sup against log2(key).

    slope and its bootstrap interval use only groups with at least 20
    fully certified records.  spearman_* is the rank correlation between
    log2(key) and sup over those records.  c_hat is set by logd_scan only.
    """

    key: str
    groups: tuple
    slope: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    spearman_rho: Optional[float]
    spearman_p: Optional[float]
    excluded: tuple = ()
    c_hat: Optional[float] = None
    exploratory: bool = False
    records: tuple = field(default=(), repr=False, compare=False)

    @property
    def ci_half_width(self) -> Optional[float]:
        if self.ci_low is None:
            return None
        return 0.5 * (self.ci_high - self.ci_low)

    @property
    def ci_contains_zero(self) -> Optional[bool]:
        if self.ci_low is None:
            return None
        return self.ci_low <= 0.0 <= self.ci_high

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("records")
        out["groups"] = [asdict(g) for g in self.groups]
        if self.exploratory:
            out["label"] = "exploratory"
        return out


def _slope(x, y) -> float:
    return float(np.polyfit(x, y, 1)[0])


def summarize(records: Sequence[SweepRecord], key: str = "n", bootstrap: int = 1000, seed: int = 0) -> GrowthSummary:
    """Group certified records by `key` ('n' or 'd') and fit max_sup against log2(key)."""
    keyf = (lambda r: r.n) if key == "n" else (lambda r: r.d)
    by = {}
    for r in records:
        by.setdefault(keyf(r), []).append(r)
    groups, used, excluded = [], [], []
    for k in sorted(by):
        sups = np.array([r.sup for r in by[k] if r.certified_fraction == 1.0])
        if sups.size == 0:
            excluded.append(k)
            continue
        groups.append(GroupStats(k, int(sups.size), float(sups.max()), float(np.median(sups))))
        if sups.size >= MIN_GROUP:
            used.append((k, sups))
        else:
            excluded.append(k)
    slope = lo = hi = rho = p = None
    if len(used) >= 2:
        x = np.log2([k for k, _ in used])
        slope = _slope(x, [s.max() for _, s in used])
        rng = _rng(seed)
        boots = np.empty(bootstrap)
        for b in range(bootstrap):
            boots[b] = _slope(x, [rng.choice(s, s.size).max() for _, s in used])
        lo, hi = (float(v) for v in np.percentile(boots, [2.5, 97.5]))
        xs = np.concatenate([np.full(s.size, xk) for xk, (_, s) in zip(x, used)])
        ys = np.concatenate([s for _, s in used])
        res = stats.spearmanr(xs, ys)
        rho, p = float(res.statistic), float(res.pvalue)
    return GrowthSummary(key, tuple(groups), slope, lo, hi, rho, p, tuple(excluded), records=tuple(records))


# -- experiments -------------------------------------------------------------


def uniformity_sweep(
    d: int,
    exponent_sets: Sequence[Sequence[int]],
    draws: int,
    coeff_decades: float = 12.0,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-6,
    seed: int = 0,
    threads: Optional[int] = None,
    bootstrap: int = 1000,
) -> Tuple[List[SweepRecord], GrowthSummary]:
    """sup_xi |m| over random coefficients for fixed d and several degrees.

    grid=None uses the phase-adapted default_grid of each draw.
    """
    if not exponent_sets:
        raise InvalidDimensions("no exponent sets given")
    sets = [tuple(int(k) for k in s) for s in exponent_sets]
    for s in sets:
        if len(s) != d:
            raise InvalidDimensions(f"exponent set {s} does not have d={d} entries")
    tasks = [
        _Task(derive_seed(seed, 1, gi, i), s, coeff_decades, grid, tol, False)
        for gi, s in enumerate(sets)
        for i in range(draws)
    ]
    records = _map(tasks, threads)
    return records, summarize(records, "n", bootstrap, seed)


def parissis_growth(
    n_values: Sequence[int],
    draws: int,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-6,
    seed: int = 0,
    coeff_decades: float = 12.0,
    threads: Optional[int] = None,
    at_zero: bool = True,
    bootstrap: int = 1000,
) -> Tuple[List[SweepRecord], GrowthSummary]:
    """Full polynomials (all exponents 2..n), |m(0)| per draw by default.

    at_zero=False takes the sup over the frequency grid instead, which
    amounts to allowing a linear term in the polynomial.
    """
    ns = [int(n) for n in n_values]
    if not ns or ns[0] < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidDimensions("n_values must be ascending integers >= 2")
    tasks = [
        _Task(derive_seed(seed, 2, n, i), tuple(range(2, n + 1)), coeff_decades, grid, tol, at_zero)
        for n in ns
        for i in range(draws)
    ]
    records = _map(tasks, threads)
    return records, summarize(records, "n", bootstrap, seed)


def logd_scan(
    d_values: Sequence[int],
    max_exp: int,
    draws: int,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-6,
    seed: int = 0,
    coeff_decades: float = 12.0,
    threads: Optional[int] = None,
    bootstrap: int = 1000,
) -> GrowthSummary:
    """Exploratory: max_sup as a function of d, with max_sup ~ a (log d)^c fitted where d >= 2."""
    ds = [int(d) for d in d_values]
    if not ds or max_exp < max(ds) + 1 or min(ds) < 1:
        raise InvalidDimensions("need 1 <= d and max_exp >= max(d) + 1")
    tasks = []
    for d in ds:
        for i in range(draws):
            s = derive_seed(seed, 3, d, i)
            Q = sample_fewnomial(s, d, max_exp, coeff_decades)
            tasks.append(_Task(s, Q.exponents, coeff_decades, grid, tol, False))
    records = _map(tasks, threads)
    summary = summarize(records, "d", bootstrap, seed)
    pts = [(g.key, g.max_sup) for g in summary.groups if g.key >= 2 and g.max_sup > 0]
    c_hat = None
    if len(pts) >= 2:
        x = np.log([math.log(k) for k, _ in pts])
        c_hat = _slope(x, np.log([v for _, v in pts]))
    return GrowthSummary(
        summary.key, summary.groups, summary.slope, summary.ci_low, summary.ci_high,
        summary.spearman_rho, summary.spearman_p, summary.excluded,
        c_hat=c_hat, exploratory=True, records=summary.records,
    )


def covers_pieces(frame, comp, l_range: IntegerInterval) -> bool:
    """True if the cutoff of `comp` is 1 on every piece support for l' in l_range.

    The support of piece l' is lam_j1^k <= |t| <= lam_j1^(k+2) with
    k = ceil(gamma_j1) + l', and the cutoff is 1 for
    comp.lo + 1 <= log_lam |t| <= comp.hi + 1.
    """
    if not comp.range.finite:
        return False
    j = comp.j1 - 1
    ratio = frame.n / frame.Q.exponents[j]
    k0 = math.ceil(frame.gamma[j]) + int(l_range.lo)
    k1 = math.ceil(frame.gamma[j]) + int(l_range.hi)
    return comp.range.lo + 1 <= k0 * ratio and (k1 + 2) * ratio <= comp.range.hi + 1


def good_piece_instances(count: int, seed: int = 0, l_range: IntegerInterval = IntegerInterval(0, 16),
                         max_d: int = 3, max_exp: int = 10, coeff_decades: float = 8.0,
                         gamma: int = 8) -> list:
    """`count` random (Q, component) pairs whose component covers the pieces of l_range.

    d cycles through 1..max_d; for each slot draws are repeated until one
    has a covering component, and the first such component is kept.
    """
    out = []
    i = 0
    while len(out) < count:
        s = derive_seed(seed, 5, i)
        i += 1
        d = 1 + len(out) % max_d
        Q = sample_fewnomial(s, d, max_exp, coeff_decades)
        frame = scale_frame(Q)
        for comp in good_components(frame, gamma):
            if covers_pieces(frame, comp, l_range):
                out.append((Q, comp))
                break
        if i > 1000 * count:
            raise InvalidDimensions("could not find enough covering components")
    return out


# -- structural property battery ---------------------------------------------


def _log2_weights(Q: Fewnomial, level: int) -> np.ndarray:
    out = []
    for a, k in zip(Q.coeffs, Q.exponents):
        w = abs(a) * (k * (k - 1) if level else 1)
        out.append(math.log2(w))
    return np.array(out)


def brute_force_bad_set(Q: Fewnomial, gamma: int, j1: int, j2: int, level: int, scan: IntegerInterval) -> List[int]:
    """Scan l over `scan`, testing the defining inequality of the bad set.

    log2 of both sides is compared in floating point; when the comparison
    is within 1e-9 of a tie it is redone in exact rational arithmetic.
    """
    n = Q.n
    lw = _log2_weights(Q, level)
    a1, a2 = Q.exponents[j1 - 1], Q.exponents[j2 - 1]
    ls = np.arange(int(scan.lo), int(scan.hi) + 1)
    diff = lw[j1 - 1] - lw[j2 - 1] + (a1 - a2) * ls / n
    bad = np.abs(diff) <= gamma
    close = np.flatnonzero(np.abs(np.abs(diff) - gamma) < 1e-9)
    if close.size:
        w1 = Fraction(abs(Q.coeffs[j1 - 1])) * (a1 * (a1 - 1) if level else 1)
        w2 = Fraction(abs(Q.coeffs[j2 - 1])) * (a2 * (a2 - 1) if level else 1)
        ratio_n = (w1 / w2) ** n
        for i in close:
            # (w1/w2)^n 2^((a1-a2) l) compared with 2^(+-n gamma)
            x = ratio_n * Fraction(2) ** int((a1 - a2) * ls[i])
            bad[i] = Fraction(2) ** (-n * gamma) <= x <= Fraction(2) ** (n * gamma)
    return ls[bad].tolist()


def _scan_window(Q: Fewnomial, gamma: int) -> IntegerInterval:
    # any bad l has |l| <= n (|log2 w1 - log2 w2| + gamma) / delta
    spread = max(np.abs(_log2_weights(Q, 0)).max(), np.abs(_log2_weights(Q, 1)).max())
    s = math.ceil(Q.n * (2 * spread + gamma)) + 8
    return IntegerInterval(-s, s)


@dataclass
class PropertyReport:
    instances: int
    seed: int
    gammas: tuple
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def count(self, name: str, ok: bool, entry: Optional[dict] = None):
        passed, failed = self.checks.get(name, (0, 0))
        self.checks[name] = (passed + int(ok), failed + int(not ok))
        if not ok and entry is not None:
            self.failures.append(entry)

    def failed(self, name: str) -> int:
        return self.checks.get(name, (0, 0))[1]

    @property
    def total_failures(self) -> int:
        return sum(f for _, f in self.checks.values())

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "seed": self.seed,
            "gammas": list(self.gammas),
            "checks": {k: {"passed": p, "failed": f} for k, (p, f) in sorted(self.checks.items())},
            "failures": self.failures,
        }


def _structure_instance(seed: int) -> Fewnomial:
    d = 1 + int(_rng(seed ^ 0x5EED).integers(0, 4))
    return sample_fewnomial(seed, d, 12, 16.0)


def _check_instance(Q: Fewnomial, gamma: int, report: PropertyReport, tag: dict):
    frame = scale_frame(Q)
    d, n = Q.d, Q.n
    scan = _scan_window(Q, gamma)
    for j1 in range(1, d + 1):
        for j2 in range(j1 + 1, d + 1):
            for level, fn in ((0, bad_set_0), (1, bad_set_1)):
                iv = fn(frame, gamma, j1, j2)
                got = list(iv) if iv is not None else []
                ref = brute_force_bad_set(Q, gamma, j1, j2, level, scan)
                entry = dict(tag, gamma=gamma, j1=j1, j2=j2, level=level)
                report.count("set_equality", got == ref,
                             dict(entry, check="set_equality", got=iv.to_json() if iv else None,
                                  expected=[ref[0], ref[-1]] if ref else None))
                report.count("connected", not ref or ref[-1] - ref[0] + 1 == len(ref),
                             dict(entry, check="connected"))
                report.count("cardinality", len(ref) <= 4 * n * gamma,
                             dict(entry, check="cardinality", size=len(ref)))
    window = default_window(frame, gamma)
    c0 = len(good_intervals(frame, gamma, window, levels=(0,)))
    c1 = len(good_intervals(frame, gamma, window))
    report.count("components_level0", c0 <= d * d, dict(tag, gamma=gamma, check="components_level0", count=c0))
    report.count("components_both", c1 <= d**4, dict(tag, gamma=gamma, check="components_both", count=c1))


def tie_instance(k: int = 3) -> Fewnomial:
    """a = (1, 2^k), alpha = (2, 4): the level-0 bad set {|k + l/2| <= gamma} has ties at both ends."""
    return make_fewnomial([1.0, 2.0**k], [2, 4])


def structure_suite(instances: int, seed: int = 0, gammas: Sequence[int] = (1, 2, 4), domination: bool = True) -> PropertyReport:
    """Decomposition invariants on random instances (d <= 4, alpha_d <= 12, |a| in [1e-8, 1e8]).

    Checks exact agreement of bad sets with a brute-force scan, their
    connectedness and size, component counts, the closed-inequality tie
    convention, and (with `domination`) the sampled domination
    inequalities at gamma_min(d).  Failing cases are recorded with the
    seed needed to replay them.
    """
    if instances < 100:
        raise InvalidDimensions("structure_suite needs at least 100 instances")
    report = PropertyReport(instances, seed, tuple(gammas))
    for i in range(instances):
        s = derive_seed(seed, 4, i)
        Q = _structure_instance(s)
        tag = {"seed": s, "coeffs": list(Q.coeffs), "exponents": list(Q.exponents)}
        for g in gammas:
            _check_instance(Q, g, report, tag)
        if domination:
            g = gamma_min(Q.d)
            for comp in good_components(scale_frame(Q), g):
                rep = verify_domination(Q, comp)
                report.count("domination", rep.passed,
                             dict(tag, gamma=g, check="domination", lo=int(comp.range.lo), hi=int(comp.range.hi)))
    for k in (0, 3, 7):
        Q = tie_instance(k)
        for g in gammas:
            iv = bad_set_0(scale_frame(Q), g, 1, 2)
            ok = iv is not None and iv.lo == -2 * k - 2 * g and iv.hi == -2 * k + 2 * g
            report.count("tie_closed", ok, {"check": "tie_closed", "k": k, "gamma": g})
    return report


def replay_failure(entry: dict) -> PropertyReport:
    """Re-run the checks of one serialized failure on its instance."""
    Q = make_fewnomial(entry["coeffs"], entry["exponents"])
    report = PropertyReport(1, entry.get("seed", 0), (entry["gamma"],))
    tag = {"seed": entry.get("seed"), "coeffs": list(Q.coeffs), "exponents": list(Q.exponents)}
    if entry["check"] == "domination":
        comp = next(c for c in good_components(scale_frame(Q), entry["gamma"])
                    if c.range.lo == entry["lo"] and c.range.hi == entry["hi"])
        rep = verify_domination(Q, comp)
        report.count("domination", rep.passed, dict(entry))
    else:
        _check_instance(Q, entry["gamma"], report, tag)
    return report

