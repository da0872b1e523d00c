"""
Monte Carlo estimators on buffered boxes.

Every estimator draws its FK configurations through run_ensemble: the chains
run on a thread pool, each sample gets its DaC marks from the sample-id
stream, and per-sample measurements come back in chain order. Error bars come
from the spread of per-chain means.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from dacperc.analysis.crossings import CrossingSpec, crossing_indicator, crossing_threshold, has_crossing, \
    lowest_crossing, spin_clusters
from dacperc.analysis.cutpoints import cut_points, packed_count
from dacperc.analysis.regions import crossing_regions
from dacperc.config import (
    BOOTSTRAP_RESAMPLES,
    CONFIDENCE_ALPHA,
    DEFAULT_BURN_IN,
    DEFAULT_CHAINS,
    DEFAULT_THIN,
    DEFAULT_THREADS,
    GUARD_SPAN_FRACTION,
    TAIL_MIN_COUNT,
)
from dacperc.core.errors import ClusterEscapesBox, ConfigError
from dacperc.core.lattice import Box, Parallelogram, Vertex, lattice_distance
from dacperc.core.managers.run_logger import NullLogger, RunLogger
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.dac import DacSample, color, dependence_range
from dacperc.models.rcm.params import EdgeConfig, RcmParams
from dacperc.models.rcm.sampler import ChainRun, check_subcriticality, default_buffer, run_chain


@dataclass(frozen=True)
class SamplerSettings:
    burn_in: int = DEFAULT_BURN_IN
    thin: int = DEFAULT_THIN
    chains: int = DEFAULT_CHAINS
    buffer: Optional[int] = None
    threads: int = DEFAULT_THREADS
    guard: float = GUARD_SPAN_FRACTION
    psi_hat: Optional[float] = None

    def box_around(self, inner: Parallelogram) -> Box:
        """An explicit buffer wins; otherwise max(ceil(2 / psi_hat), MIN_BUFFER)."""
        return Box.around(inner, self.buffer if self.buffer is not None else default_buffer(self.psi_hat))

    @classmethod
    def from_run_config(cls, config, threads: Optional[int] = None) -> "SamplerSettings":
        return cls(
            burn_in=config.burn_in,
            thin=config.thin,
            chains=config.chains,
            buffer=config.buffer,
            threads=threads or DEFAULT_THREADS,
            psi_hat=config.psi_hat,
        )


@dataclass
class Estimate:
    value: float
    stderr: float
    count: int
    ess: float
    seed: int
    fingerprint: str = ""

    def interval(self, alpha: float = CONFIDENCE_ALPHA):
        """Clopper-Pearson bounds for a frequency, with the effective sample size as trial count."""
        return clopper_pearson(self.value, self.ess, alpha)

    def to_record(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "count": self.count,
            "ess": self.ess,
            "seed": self.seed,
            "fingerprint": self.fingerprint,
        }


def make_estimate(per_chain: Sequence[Sequence[float]], seed: int, fingerprint: str = "") -> Estimate:
    """
    Mean over all samples; standard error from the per-chain means. With a
    single chain the chain is cut into eight batches instead.
    """
    arrays = [np.asarray(v, dtype=float) for v in per_chain if len(v)]
    if not arrays:
        return Estimate(math.nan, math.nan, 0, 0.0, seed, fingerprint)
    values = np.concatenate(arrays)
    n = values.size
    if len(arrays) == 1:
        arrays = [b for b in np.array_split(values, min(8, n)) if b.size]
    means = np.array([a.mean() for a in arrays])
    stderr = float(means.std(ddof=1) / math.sqrt(means.size)) if means.size > 1 else math.nan
    var = float(values.var(ddof=1)) if n > 1 else 0.0
    if not math.isfinite(stderr) or stderr == 0.0:
        ess = float(n)
    else:
        ess = float(min(n, var / stderr ** 2))
    return Estimate(float(values.mean()), stderr, n, ess, seed, fingerprint)


def clopper_pearson(frequency: float, trials: float, alpha: float = CONFIDENCE_ALPHA):
    if trials <= 0 or not math.isfinite(frequency):
        return 0.0, 1.0
    k = frequency * trials
    lower = 0.0 if k <= 0 else float(stats.beta.ppf(alpha / 2, k, trials - k + 1))
    upper = 1.0 if k >= trials else float(stats.beta.ppf(1 - alpha / 2, k + 1, trials - k))
    return lower, upper


@dataclass
class Ensemble:
    box: Box
    runs: List[ChainRun]
    guard_fraction: float

    @property
    def per_chain(self) -> List[List[Any]]:
        return [run.results for run in self.runs]

    def records(self) -> List[Any]:
        return [x for run in self.runs for x in run.results]

    def map(self, fn: Callable[[Any], float]) -> List[List[float]]:
        return [[fn(x) for x in run.results] for run in self.runs]

    def diagnostics(self) -> List[Dict[str, Any]]:
        return [run.diagnostics() for run in self.runs]

    @property
    def thin_warning(self) -> bool:
        return any(run.thin_warning for run in self.runs)


def split_counts(samples: int, chains: int) -> List[int]:
    return [samples // chains + (1 if c < samples % chains else 0) for c in range(chains)]


def run_ensemble(
    inner: Parallelogram,
    beta: float,
    samples: int,
    seed: int,
    measure: Callable[[DacSample], Any],
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> Ensemble:
    """
    Draw `samples` DaC samples on the box around `inner`, spread over the
    configured chains, and apply `measure` to each. Sample ids run from 0 in
    chain order, so results do not depend on the thread count.
    """
    settings = settings or SamplerSettings()
    logger = logger or NullLogger()
    if settings.chains < 1:
        raise ConfigError("chains must be >= 1")
    box = settings.box_around(inner)
    params = RcmParams(beta)
    graph = box.graph
    graph.view(inner)
    graph.outer_boundary_mask()
    stream = StreamManager(seed)
    counts = split_counts(samples, settings.chains)
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(int).tolist()

    def one_chain(c: int) -> ChainRun:
        def on_sample(bonds: np.ndarray, j: int):
            eta = EdgeConfig(graph, bonds.astype(np.uint8))
            return measure(DacSample.draw(eta, stream, offsets[c] + j))
        return run_chain(box, params, settings.burn_in, settings.thin, counts[c], seed, chain=c, measure=on_sample)

    logger.log("sampling", {"box": box.outer.literal(), "buffer": box.buffer, "beta": beta,
                            "samples": samples, "chains": settings.chains, "seed": seed})
    with ThreadPoolExecutor(max_workers=max(1, settings.threads)) as pool:
        runs = list(pool.map(one_chain, range(settings.chains)))

    for run in runs:
        logger.log("diagnostic", run.diagnostics(), success=not run.thin_warning)
    flags = np.concatenate([run.spanning for run in runs]) if runs else np.zeros(0, dtype=bool)
    try:
        fraction = check_subcriticality(flags, settings.guard)
    except Exception as e:
        logger.log("guard", {"fraction": float(flags.mean()) if flags.size else 0.0}, success=False, error=str(e))
        raise
    logger.log("guard", {"fraction": fraction})
    return Ensemble(box=box, runs=runs, guard_fraction=fraction)


@dataclass
class CrossingResult:
    spec: CrossingSpec
    r: float
    estimate: Estimate
    ensemble: Ensemble
    sensitivity: Optional[Dict[str, Any]] = None

    def raw_rows(self):
        for c, run in enumerate(self.ensemble.runs):
            for j, hit in enumerate(run.results):
                yield c, j, int(hit)


def crossing_prob(
    beta: float,
    r: float,
    spec: CrossingSpec,
    samples: int,
    seed: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> CrossingResult:
    """Frequency of the crossing event in color(sample, r)."""
    ensemble = run_ensemble(spec.region, beta, samples, seed,
                            lambda s: has_crossing(color(s, r), spec), settings, logger)
    estimate = make_estimate(ensemble.map(float), seed)
    (logger or NullLogger()).log("estimate", {"event": spec.label, "r": r, **estimate.to_record()})
    return CrossingResult(spec=spec, r=r, estimate=estimate, ensemble=ensemble)


def buffer_sensitivity(
    beta: float,
    r: float,
    spec: CrossingSpec,
    samples: int,
    seed: int,
    buffers: Sequence[int],
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> CrossingResult:
    """crossing_prob at two buffer widths; the result carries the thinner run plus the difference."""
    if len(buffers) != 2:
        raise ConfigError("buffer sensitivity needs exactly two buffer widths")
    settings = settings or SamplerSettings()
    results = [
        crossing_prob(beta, r, spec, samples, seed, _with_buffer(settings, b), logger) for b in buffers
    ]
    a, b = results[0].estimate, results[1].estimate
    results[0].sensitivity = {
        "buffers": list(buffers),
        "values": [a.value, b.value],
        "difference": b.value - a.value,
        "stderr": math.hypot(a.stderr, b.stderr) if math.isfinite(a.stderr) and math.isfinite(b.stderr) else math.nan,
    }
    return results[0]


def _with_buffer(settings: SamplerSettings, buffer: int) -> SamplerSettings:
    return replace(settings, buffer=buffer)


@dataclass
class DualityReport:
    n: int
    r: float
    h_minus: Estimate
    v_plus: Estimate
    complement_failures: int
    reflection_failures: int

    @property
    def exact(self) -> bool:
        return self.complement_failures == 0 and self.reflection_failures == 0

    def to_record(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "r": self.r,
            "h_minus": self.h_minus.to_record(),
            "v_plus": self.v_plus.to_record(),
            "sum": self.h_minus.value + self.v_plus.value,
            "complement_failures": self.complement_failures,
            "reflection_failures": self.reflection_failures,
        }


def duality_audit(
    beta: float,
    n: int,
    samples: int,
    seed: int,
    r: float = 0.5,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> DualityReport:
    """
    On the same samples of S_{n,n}: H- and V+ must be complementary, and H+
    of the reflected colouring must coincide with V+.
    """
    square = Parallelogram.s(n, n)
    h_minus = CrossingSpec(square, "horizontal", -1)
    h_plus = CrossingSpec(square, "horizontal", 1)
    v_plus = CrossingSpec(square, "vertical", 1)

    def measure(sample: DacSample):
        sigma = color(sample, r)
        return (has_crossing(sigma, h_minus), has_crossing(sigma, v_plus), has_crossing(sigma.reflected(), h_plus))

    ensemble = run_ensemble(square, beta, samples, seed, measure, settings, logger)
    records = ensemble.records()
    return DualityReport(
        n=n,
        r=r,
        h_minus=make_estimate(ensemble.map(lambda x: float(x[0])), seed),
        v_plus=make_estimate(ensemble.map(lambda x: float(x[1])), seed),
        complement_failures=sum(1 for hm, vp, _ in records if hm == vp),
        reflection_failures=sum(1 for _, vp, hr in records if vp != hr),
    )


def origin_reach(sigma, window: Parallelogram, origin: Vertex = Vertex(0, 0)) -> int:
    """Largest distance from the origin within its (+)-cluster inside the window; -1 if the origin is (-)."""
    clusters = spin_clusters(sigma, window)
    i = sigma.graph.index[origin]
    if sigma.spins[i] < 0:
        return -1
    members = clusters.members(int(clusters.ids[i]))
    g = sigma.graph
    return max(lattice_distance(origin, g.vertices[j]) for j in members.tolist())


@dataclass
class ThetaCurve:
    r_grid: List[float]
    radius_grid: List[int]
    estimates: Dict[tuple, Estimate]
    ensemble: Ensemble

    def is_monotone(self) -> bool:
        """Pathwise: nondecreasing in r, nonincreasing in m, for every sample."""
        for reaches in self.ensemble.records():
            reach = np.asarray(reaches)
            if np.any(np.diff(reach) < 0):
                return False
        return True

    def rows(self):
        for (r, m), est in sorted(self.estimates.items()):
            yield r, m, est


def theta_curve(
    beta: float,
    r_grid: Sequence[float],
    radius_grid: Sequence[int],
    samples: int,
    seed: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> ThetaCurve:
    """P(origin's (+)-cluster meets the sphere of radius m), for every (r, m) on the grid."""
    r_grid = sorted(float(r) for r in r_grid)
    radius_grid = sorted(int(m) for m in radius_grid)
    if not r_grid or not radius_grid:
        raise ConfigError("theta curve needs a nonempty r-grid and radius-grid")
    if radius_grid[0] < 0:
        raise ConfigError("radii must be >= 0")
    big = max(radius_grid[-1], 1)
    window = Parallelogram(-big, big, -big, big)

    def measure(sample: DacSample):
        return [origin_reach(color(sample, r), window) for r in r_grid]

    ensemble = run_ensemble(window, beta, samples, seed, measure, settings, logger)
    estimates = {}
    for a, r in enumerate(r_grid):
        for m in radius_grid:
            estimates[(r, m)] = make_estimate(ensemble.map(lambda x: float(x[a] >= m)), seed)
    return ThetaCurve(list(r_grid), list(radius_grid), estimates, ensemble)


def bisect_half(thresholds: np.ndarray, iterations: int = 60, target: float = 0.5) -> float:
    """Smallest r where the fraction of thresholds below r reaches the target, by bisection."""
    if thresholds.size == 0:
        return math.nan
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.mean(thresholds < mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class RcEstimate:
    n: int
    spec: CrossingSpec
    r_hat: float
    stderr: float
    grid: np.ndarray
    curve: List[Estimate]
    ensemble: Ensemble
    bootstrap: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def monotone(self) -> bool:
        values = np.array([e.value for e in self.curve])
        return bool(np.all(np.diff(values) >= 0))

    def to_record(self) -> Dict[str, Any]:
        return {"n": self.n, "event": self.spec.label, "region": self.spec.region.literal(),
                "r_hat": self.r_hat, "stderr": self.stderr, "monotone": self.monotone}


def rc_locator(
    beta: float,
    n: int,
    samples: int,
    seed: int,
    square: bool = False,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
    grid_points: int = 101,
    resamples: int = BOOTSTRAP_RESAMPLES,
) -> RcEstimate:
    """
    Crossing point of r -> P(V+ of S_{n,3n}) (or H+ of S_{n,n} with square=True).
    Each sample contributes its switching threshold, so the curve is known
    exactly on the sample set; the error bar resamples whole chains.
    """
    spec = CrossingSpec(Parallelogram.s(n, n), "horizontal", 1) if square \
        else CrossingSpec(Parallelogram.s(n, 3 * n), "vertical", 1)
    ensemble = run_ensemble(spec.region, beta, samples, seed, lambda s: crossing_threshold(s, spec), settings, logger)
    per_chain = [np.asarray(t, dtype=float) for t in ensemble.per_chain]
    thresholds = np.concatenate(per_chain)
    r_hat = bisect_half(thresholds)

    rng = StreamManager(seed).bootstrap_generator(n)
    units = [t for t in per_chain if t.size]
    if len(units) < 2:
        units = [thresholds[i:i + 1] for i in range(thresholds.size)]
    boot = np.array([
        bisect_half(np.concatenate([units[i] for i in rng.integers(0, len(units), len(units))]))
        for _ in range(resamples)
    ]) if units else np.zeros(0)
    stderr = float(boot.std(ddof=1)) if boot.size > 1 else math.nan

    grid = np.linspace(0.0, 1.0, grid_points)
    curve = [make_estimate([[float(crossing_indicator(t, r, 1)) for t in chain] for chain in per_chain], seed)
             for r in grid]
    result = RcEstimate(n, spec, r_hat, stderr, grid, curve, ensemble, boot)
    (logger or NullLogger()).log("estimate", result.to_record())
    return result


@dataclass
class TailFit:
    x: np.ndarray
    log_survival: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    degenerate: bool = False
    truncated_fraction: float = 0.0
    support: np.ndarray = field(default_factory=lambda: np.zeros(0))
    survival: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean: float = math.nan

    @property
    def rate(self) -> float:
        """Decay rate -slope (psi hat for FK ranges)."""
        return -self.slope

    def to_record(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "rate": self.rate,
            "degenerate": self.degenerate,
            "truncated_fraction": self.truncated_fraction,
            "fitted_points": int(self.x.size),
            "mean": self.mean,
        }


def fit_survival(values: Sequence[int], start: int = 1, truncated: Optional[Sequence[bool]] = None,
                 min_count: int = TAIL_MIN_COUNT) -> TailFit:
    """
    Least-squares line through log P(X >= s) for s >= start, over the values
    of s with at least min_count observations at or above s.
    """
    x = np.asarray(values, dtype=np.int64)
    trunc = float(np.mean(truncated)) if truncated is not None and len(truncated) else 0.0
    mean = float(x.mean()) if x.size else math.nan
    empty = np.zeros(0)
    if x.size == 0 or x.max() < start:
        return TailFit(empty, empty, math.nan, math.nan, math.nan, True, trunc, mean=mean)
    support = np.arange(start, int(x.max()) + 1)
    hist = np.bincount(x[x >= start] - start, minlength=support.size)
    at_least = np.cumsum(hist[::-1])[::-1]
    survival = at_least / x.size
    keep = at_least >= min_count
    if keep.sum() < 2:
        return TailFit(empty, empty, math.nan, math.nan, math.nan, True, trunc, support, survival, mean)
    xs, ys = support[keep].astype(float), np.log(survival[keep])
    fit = stats.linregress(xs, ys)
    return TailFit(xs, ys, float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2),
                   False, trunc, support, survival, mean)


def _centered_window(half: int) -> Parallelogram:
    return Parallelogram(-half, half, -half, half)


def cluster_tail(
    beta: float,
    r: float,
    samples: int,
    seed: int,
    window: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
):
    """
    Size of the origin's (+)-cluster inside [-W, W]^2 (0 when the origin is
    (-)); clusters touching the window sides count as truncated.
    """
    region = _centered_window(window)

    def measure(sample: DacSample):
        sigma = color(sample, r)
        i = sample.graph.index[Vertex(0, 0)]
        if sigma.spins[i] < 0:
            return 0, False
        clusters = spin_clusters(sigma, region)
        members = clusters.members(int(clusters.ids[i]))
        k, l = sample.graph.k[members], sample.graph.l[members]
        touches = bool(np.any((k == region.a) | (k == region.b) | (l == region.c) | (l == region.d)))
        return int(members.size), touches

    ensemble = run_ensemble(region, beta, samples, seed, measure, settings, logger)
    records = ensemble.records()
    fit = fit_survival([s for s, _ in records], start=1, truncated=[t for _, t in records])
    (logger or NullLogger()).log("estimate", {"tail": "cluster", "r": r, **fit.to_record()})
    return fit, ensemble


def fk_range_tail(
    beta: float,
    samples: int,
    seed: int,
    window: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
):
    """Tail of D(0), the dependence range at the origin; the fitted rate is psi hat."""
    region = _centered_window(window)

    def measure(sample: DacSample):
        try:
            return dependence_range(sample, Vertex(0, 0)), False
        except ClusterEscapesBox:
            return sample.graph.region.width + sample.graph.region.height, True

    ensemble = run_ensemble(region, beta, samples, seed, measure, settings, logger)
    records = ensemble.records()
    fit = fit_survival([d for d, _ in records], start=1, truncated=[t for _, t in records])
    (logger or NullLogger()).log("estimate", {"tail": "fk-range", **fit.to_record()})
    return fit, ensemble


@dataclass
class FiniteSizeReport:
    big_n: int
    eps: float
    r: float
    range_threshold: int
    range_frequency: Estimate
    range_upper: float
    range_extrapolated: Optional[float]
    lhs: float
    crossing: Estimate
    crossing_lower: float

    @property
    def range_condition(self) -> bool:
        return self.lhs <= self.eps

    @property
    def crossing_condition(self) -> bool:
        return self.crossing_lower > 1.0 - self.eps

    @property
    def passed(self) -> bool:
        return self.range_condition and self.crossing_condition

    def to_record(self) -> Dict[str, Any]:
        return {
            "N": self.big_n,
            "eps": self.eps,
            "r": self.r,
            "range_threshold": self.range_threshold,
            "range_frequency": self.range_frequency.to_record(),
            "range_upper": self.range_upper,
            "range_extrapolated": self.range_extrapolated,
            "lhs": self.lhs,
            "range_condition": self.range_condition,
            "crossing": self.crossing.to_record(),
            "crossing_lower": self.crossing_lower,
            "crossing_condition": self.crossing_condition,
            "passed": self.passed,
        }


def finite_size_check(
    beta: float,
    big_n: int,
    eps: float,
    r: float,
    samples: int,
    seed: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
    alpha: float = CONFIDENCE_ALPHA,
) -> FiniteSizeReport:
    """
    Evaluates (N+1)(3N+1) nu(D(0) >= N/3) <= eps and P(V+ of S_{N,3N}) > 1 - eps
    with one-sided Clopper-Pearson bounds. D is read at the centre of the
    tall region; a cluster leaving the box counts as exceeding the threshold.
    """
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"eps must lie in (0, 1), got {eps}")
    region = Parallelogram.s(big_n, 3 * big_n)
    spec = CrossingSpec(region, "vertical", 1)
    centre = Vertex(big_n // 2, (3 * big_n) // 2)
    threshold = math.ceil(big_n / 3)

    def measure(sample: DacSample):
        try:
            d = dependence_range(sample, centre)
        except ClusterEscapesBox:
            d = threshold
        return d, has_crossing(color(sample, r), spec)

    ensemble = run_ensemble(region, beta, samples, seed, measure, settings, logger)
    exceed = make_estimate(ensemble.map(lambda x: float(x[0] >= threshold)), seed)
    crossing = make_estimate(ensemble.map(lambda x: float(x[1])), seed)

    if beta == 0.0:
        upper = 0.0
    else:
        upper = clopper_pearson(exceed.value, exceed.ess, alpha)[1]
    extrapolated = None
    if exceed.value * exceed.count < TAIL_MIN_COUNT:
        fit = fit_survival([d for d, _ in ensemble.records()], start=1)
        if not fit.degenerate:
            extrapolated = float(math.exp(fit.intercept + fit.slope * threshold))
    report = FiniteSizeReport(
        big_n=big_n,
        eps=eps,
        r=r,
        range_threshold=threshold,
        range_frequency=exceed,
        range_upper=upper,
        range_extrapolated=extrapolated,
        lhs=(big_n + 1) * (3 * big_n + 1) * upper,
        crossing=crossing,
        crossing_lower=clopper_pearson(crossing.value, crossing.ess, alpha)[0],
    )
    (logger or NullLogger()).log("estimate", report.to_record())
    return report


@dataclass
class CutpointGrowth:
    r: float
    estimates: Dict[int, Estimate]
    found: Dict[int, float]
    ensembles: Dict[int, Ensemble]

    def increasing(self) -> bool:
        """Strictly increasing beyond joint two-sigma error bars."""
        ns = sorted(self.estimates)
        for a, b in zip(ns, ns[1:]):
            ea, eb = self.estimates[a], self.estimates[b]
            if not eb.value - ea.value > 2 * math.hypot(ea.stderr, eb.stderr):
                return False
        return True


def cutpoint_count(sample: DacSample, r: float, n: int, mode: str = "greedy") -> Optional[int]:
    """c(R) for the lowest (-)-crossing R of S_{n,4n}, or None without one."""
    sigma = color(sample, r)
    R = lowest_crossing(sigma, Parallelogram.s(n, 4 * n))
    if R is None:
        return None
    regions = crossing_regions(R, n)
    return packed_count(cut_points(sigma, R, n, regions), regions.crossing, n, mode).c


def cutpoint_growth(
    beta: float,
    n_list: Sequence[int],
    samples: int,
    seed: int,
    r: float = 0.5,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> CutpointGrowth:
    """E[c(R)] per n, over the samples that have a lowest crossing."""
    estimates, found, ensembles = {}, {}, {}
    for n in sorted(n_list):
        ensemble = run_ensemble(Parallelogram.s(n, 6 * n), beta, samples, seed,
                                lambda s, n=n: cutpoint_count(s, r, n), settings, logger)
        kept = [[float(c) for c in run.results if c is not None] for run in ensemble.runs]
        estimates[n] = make_estimate(kept, seed)
        found[n] = sum(len(k) for k in kept) / max(samples, 1)
        ensembles[n] = ensemble
        (logger or NullLogger()).log("estimate", {"n": n, "found": found[n], **estimates[n].to_record()})
    return CutpointGrowth(r, estimates, found, ensembles)


def two_giants(sigma, region: Parallelogram) -> bool:
    """The two largest (+)-clusters in the region each join a pair of opposite sides."""
    clusters = spin_clusters(sigma, region)
    roots = [root for root in clusters.sizes if clusters.sign_of(root) > 0]
    if len(roots) < 2:
        return False
    roots.sort(key=lambda root: (-clusters.sizes[root], root))
    g = sigma.graph
    for root in roots[:2]:
        members = clusters.members(root)
        k, l = g.k[members], g.l[members]
        across = (k.min() == region.a and k.max() == region.b) or (l.min() == region.c and l.max() == region.d)
        if not across:
            return False
    return True


def uniqueness_probe(
    beta: float,
    r: float,
    windows: Sequence[int],
    samples: int,
    seed: int,
    settings: Optional[SamplerSettings] = None,
    logger: Optional[RunLogger] = None,
) -> Dict[int, Estimate]:
    result: Dict[int, Estimate] = {}
    for w in sorted(windows):
        region = Parallelogram.s(w, w)
        ensemble = run_ensemble(region, beta, samples, seed, lambda s: two_giants(color(s, r), region),
                                settings, logger)
        result[w] = make_estimate(ensemble.map(float), seed)
        (logger or NullLogger()).log("estimate", {"window": w, **result[w].to_record()})
    return result
