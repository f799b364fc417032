"""Runtime and ratio benchmark: approximate algorithms against the exact DP."""
from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import kernels, seeding
from .channel import corrupt
from .indexing import build_indexing_scheme, build_two_layer_scheme, run_ed_approx
from .strings import IndexedString, pair_keys

METHODS = ("dp", "ed_approx-1layer", "ed_approx-2layer")
GATE_APPROX = 3.0
GATE_REGRESSION = 3.5
GATE_DP = 3.4


@dataclass
class BenchRow:
    n: int
    trial: int
    seed: int
    method: str
    distance: int
    oracle: int | None
    ratio: float | None
    edges: int | None
    time: float | None = None

    def key(self):
        return (self.n, self.trial, METHODS.index(self.method))


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def to_jsonl(self, timing: bool = True) -> str:
        out = []
        for r in self.rows:
            d = asdict(r)
            if not timing:
                d.pop("time")
            out.append(json.dumps(d, sort_keys=True))
        return "".join(line + "\n" for line in out)

    def to_tsv(self, timing: bool = True) -> str:
        cols = ["n", "trial", "seed", "method", "distance", "oracle", "ratio", "edges"]
        if timing:
            cols.append("time")
        lines = ["\t".join(cols)]
        for r in self.rows:
            d = asdict(r)
            lines.append("\t".join("" if d[c] is None else
                                   (f"{d[c]:.6f}" if isinstance(d[c], float) else str(d[c]))
                                   for c in cols))
        return "\n".join(lines) + "\n"

    def median_times(self) -> dict:
        per: dict = {}
        for r in self.rows:
            if r.time is not None:
                per.setdefault(r.method, {}).setdefault(r.n, []).append(r.time)
        return {m: {n: statistics.median(v) for n, v in sorted(d.items())} for m, d in per.items()}


def _timed(fn, repeats):
    best, out = None, None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        el = time.perf_counter() - t
        best = el if best is None else min(best, el)
    return out, best


def _task(args):
    n, trial, seed, _ = args
    try:
        return _one(*args)
    except Exception as exc:
        raise RuntimeError(f"bench failed at n={n} trial={trial} seed={seed}: {exc}") from exc


def _one(n, trial, seed, p):
    s_seed = seeding.child_seed(seed, "bench", n, trial)
    rows = []
    payload = IndexedString.plain(seeding.rng(s_seed, "payload").integers(0, p["q"], n), q=p["q"])
    schemes = []
    if 1 in p["layers"]:
        schemes.append(("ed_approx-1layer", build_indexing_scheme(n, p["eps"], N=p["N"], seed=s_seed)))
    if 2 in p["layers"]:
        schemes.append(("ed_approx-2layer", build_two_layer_scheme(
            n, p["eps2"], N1=p["N1"], N2=p["N2"], seed=s_seed)))
    with_dp = n <= p["dp_cutoff"]
    for method, sch in schemes:
        s = sch.attach(payload)
        t, _ = corrupt(s, p["delta"], p["gamma"], p["mode"], seed=s_seed)
        run, el = _timed(lambda: run_ed_approx(s, t, sch), p["repeats"])
        oracle = ratio = None
        if with_dp:
            # each layer count has its own index string, hence its own oracle
            a, b = pair_keys(s, t)
            d, el_dp = _timed(lambda: kernels.ed_distance(a, b), 1)
            oracle = int(d)
            ratio = run.script.size / oracle if oracle else None
            if not rows:
                rows.append(BenchRow(n, trial, s_seed, "dp", oracle, oracle, None, None, el_dp))
        rows.append(BenchRow(n, trial, s_seed, method, run.script.size, oracle, ratio,
                             run.edge_count, el))
    return rows


def run_bench(sizes, eps: float = 1 / 21, trials: int = 3, seed: int = 0, layers=(1,),
              dp_cutoff: int = 16384, delta: float = 0.05, gamma: float = 0.05,
              mode: str = "uniform", N: int = 16, eps2: float = 1 / 121, N1: int = 48, N2: int = 8,
              q: int = 4, repeats: int = 3, jobs: int = 1) -> BenchReport:
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be sorted ascending")
    p = dict(eps=eps, eps2=eps2, layers=tuple(layers), dp_cutoff=dp_cutoff, delta=delta,
             gamma=gamma, mode=mode, N=N, N1=N1, N2=N2, q=q, repeats=repeats)
    tasks = [(n, t, seed, p) for n in sizes for t in range(trials)]
    rows = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for part in ex.map(_task, tasks):
                rows.extend(part)
    else:
        for task in tasks:
            rows.extend(_task(task))
    rows.sort(key=BenchRow.key)
    return BenchReport(rows, dict(p, sizes=sizes, trials=trials, seed=seed))


@dataclass
class GateResult:
    status: str  # pass, warn or regression
    factors: dict
    messages: list


def scaling_gate(report: BenchReport, min_n: int = 4096) -> GateResult:
    """Growth factor per doubling of n, judged from min_n upward against the soft thresholds."""
    med = report.median_times()
    factors, msgs = {}, []
    status = "pass"
    for method, by_n in med.items():
        ns = sorted(by_n)
        fs = {}
        for a, b in zip(ns, ns[1:]):
            if b != 2 * a or by_n[a] <= 0:
                continue
            f = by_n[b] / by_n[a]
            fs[f"{a}->{b}"] = f
            if a < min_n:
                continue
            if method == "dp":
                if f < GATE_DP:
                    msgs.append(f"dp factor {f:.2f} at {a}->{b} is below {GATE_DP}")
                    status = "warn" if status == "pass" else status
            elif f > GATE_REGRESSION:
                msgs.append(f"{method} factor {f:.2f} at {a}->{b} exceeds {GATE_REGRESSION}")
                status = "regression"
            elif f > GATE_APPROX:
                msgs.append(f"{method} factor {f:.2f} at {a}->{b} exceeds {GATE_APPROX}")
                status = "warn" if status == "pass" else status
        factors[method] = fs
    return GateResult(status, factors, msgs)


def ratio_violations(report: BenchReport) -> list:
    bound = {"ed_approx-1layer": 1 + 11 * report.params.get("eps", 1 / 21),
             "ed_approx-2layer": 1 + 23 * report.params.get("eps2", 1 / 121)}
    return [r for r in report.rows
            if r.method in bound and r.ratio is not None and r.ratio > bound[r.method] + 1e-9]


def summary_table(report: BenchReport) -> str:
    med = report.median_times()
    lines = ["method\tn\tmedian_time"]
    for m in sorted(med, key=METHODS.index):
        for n, t in med[m].items():
            lines.append(f"{m}\t{n}\t{t:.6f}")
    return "\n".join(lines) + "\n"

