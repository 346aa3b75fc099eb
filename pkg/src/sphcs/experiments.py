"""Numerical studies: sparsity, compressibility, recovery, measurement sweeps,
an on-grid Wigner-D baseline and the noise / grid-density study.

Every study takes an :class:`ExperimentSpec` and returns a :class:`Table`.
Trials draw their randomness from ``SeedSequence([seed, *key])`` where the
key names the sweep point and trial number, so results do not depend on how
trials are scheduled. ``workers > 1`` runs trials in a process pool.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
import hashlib
import json
import math
import time

import numpy as np

from .fields import preset, random_sparse_coefficients, PRESETS
from .grid import build_grid, physical_map, select_rows, selection_from_rows
from .operator import simulate, noise_std_from_db, field_peak
from .recovery import classical_inversion, normalized_error, recover_field, score, snr_db
from .solver import MatrixOperator, SolverConfig, solve_qcbp
from .transform import FourierCoefficients, WignerCoefficients, a_to_b, b_to_a, sparsity_report, \
    wigner_series
from .wigner import wigner_d

__all__ = [
    "ExperimentSpec",
    "Table",
    "EXPERIMENTS",
    "run_experiment",
    "run_sparsity_study",
    "run_compressibility_study",
    "run_recovery",
    "run_measurement_sweep",
    "run_baseline_wignerD",
    "run_noise_density_study",
    "trial_seed",
    "mean_of",
    "cs_trial",
    "classical_trial",
]

NYQUIST_2D_CLASSICAL = 496   # (2 n_max + 2)(n_max + 1) for n_max = 15


@dataclass
class ExperimentSpec:
    experiment: str
    preset: str = "C1a"
    n_max: int = 15
    oversample: int = 1
    trials: int = 25
    seed: int = 0
    noise_db: float = None
    out: str = None
    rows: int = None
    density: float = None
    dims: int = 2
    workers: int = 1
    radius_rule: str = "noise-norm"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if self.density is not None and not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if self.preset.upper() not in {p.upper() for p in PRESETS}:
            raise ValueError(f"unknown preset {self.preset!r}")


class Table:
    """Named columns plus a metadata dict; writes CSV with '#' headers or JSON."""

    def __init__(self, columns, rows=(), meta=None, volatile=()):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = dict(meta or {})
        self.volatile = set(volatile)   # excluded from the digest (timings)

    def append(self, *row):
        if len(row) != len(self.columns):
            raise ValueError("row length does not match columns")
        self.rows.append(list(row))

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def __len__(self):
        return len(self.rows)

    @staticmethod
    def _fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    def to_csv(self, fh):
        for k, v in self.meta.items():
            fh.write(f"# {k}={json.dumps(v, default=str)}\n")
        fh.write(",".join(self.columns) + "\n")
        for r in self.rows:
            fh.write(",".join(self._fmt(v) for v in r) + "\n")

    def to_json(self):
        def clean(v):
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, (float, np.floating)):
                v = float(v)
                return v if math.isfinite(v) else str(v)
            return v
        return {"meta": self.meta, "columns": self.columns,
                "rows": [[clean(v) for v in r] for r in self.rows]}

    def save(self, path, fmt="csv", sidecar=False):
        with open(path, "w") as fh:
            if fmt == "csv":
                self.to_csv(fh)
            elif fmt == "json":
                json.dump(self.to_json(), fh, indent=1, default=str)
            else:
                raise ValueError("format must be csv or json")
        if sidecar and fmt == "csv":
            with open(str(path) + ".json", "w") as fh:
                json.dump(self.to_json(), fh, indent=1, default=str)

    def digest(self):
        """SHA-256 over the non-volatile cells."""
        keep = [i for i, c in enumerate(self.columns) if c not in self.volatile]
        h = hashlib.sha256()
        h.update(",".join(self.columns[i] for i in keep).encode())
        for r in self.rows:
            h.update(("\n" + ",".join(self._fmt(r[i]) for i in keep)).encode())
        return h.hexdigest()


def trial_seed(seed, *key):
    """Independent stream for one (sweep point, trial) key."""
    return np.random.SeedSequence([int(seed)] + [int(k) for k in key])


def mean_of(values):
    """Order-independent mean (exactly rounded sum); NaN for empty input."""
    values = [float(v) for v in values]
    if not values:
        return float("nan")
    if any(math.isinf(v) for v in values):
        return float(np.mean(values))
    return math.fsum(values) / len(values)


def _map(fn, tasks, workers):
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _meta(spec, **extra):
    from . import __version__
    m = {"experiment": spec.experiment, "spec": asdict(spec), "version": __version__}
    m.update(extra)
    return m


# -- sparsity ---------------------------------------------------------------

def _sparsity_trial(task):
    n_max, s_d, mu_zero, ss = task
    a = random_sparse_coefficients(n_max, s_d, seed=np.random.default_rng(ss), mu_zero_only=mu_zero)
    return sparsity_report(a=a)


def run_sparsity_study(spec):
    """Mean s_F over random s_D-sparse coefficient sets (values 1)."""
    n_max = spec.n_max
    mu_zero = spec.dims == 2
    admissible = (n_max + 1) ** 2 if mu_zero else sum((2 * n + 1) ** 2 for n in range(n_max + 1))
    sweep = spec.params.get("s_D") or sorted(set(np.unique(np.geomspace(1, admissible, 24).astype(int))))
    tasks = [(n_max, int(s), mu_zero, trial_seed(spec.seed, s, t)) for s in sweep for t in range(spec.trials)]
    reports = _map(_sparsity_trial, tasks, spec.workers)
    side = 2 * n_max + 2
    table = Table(["s_D", "mean_s_F", "max_s_F", "max_bound_violation"],
                  meta=_meta(spec, fourier_cube=side**spec.dims, admissible=admissible))
    for i, s in enumerate(sweep):
        rs = reports[i * spec.trials:(i + 1) * spec.trials]
        viol = max(max(r.s_F - r.subspace_bound, r.s_F - r.worst_case_bound) for r in rs)
        table.append(int(s), mean_of(r.s_F for r in rs), max(r.s_F for r in rs), int(viol))
    return table


# -- compressibility --------------------------------------------------------

def _db(x):
    with np.errstate(divide="ignore"):
        return 10 * np.log10(x)


def _tail_errors(mag2):
    """Normalised error of keeping the n_c largest entries, n_c = 1..len."""
    srt = np.sort(mag2)[::-1]
    total = srt.sum()
    tail = total - np.cumsum(srt)
    tail[-1] = 0.0
    return np.maximum(tail, 0) / total


def run_compressibility_study(spec):
    """Sorted magnitudes and best-n_c truncation errors in both bases.

    Curves: Wigner coefficients truncated directly; Fourier coefficients
    truncated directly; Fourier coefficients truncated and mapped back to
    Wigner coefficients. Errors are in dB with -inf for an exact fit.
    """
    _, _, a = preset(spec.preset, spec.n_max, probe_seed=spec.seed)
    b = a_to_b(a, dims=spec.dims if a.mu_zero_only else 3)
    wa = np.abs(a.values[np.abs(a.values) > 0]) ** 2
    wb = np.abs(b.values.ravel()) ** 2
    wb = wb[wb > 0]
    order = np.argsort(np.abs(b.values.ravel()))[::-1]
    back = []
    limit = spec.params.get("max_nc", len(order))
    for n_c in range(1, min(limit, len(wb)) + 1):
        keep = np.zeros(b.values.size, dtype=complex)
        keep[order[:n_c]] = b.values.ravel()[order[:n_c]]
        ahat = b_to_a(FourierCoefficients(b.n_max, b.dims, keep.reshape(b.values.shape)))
        back.append(normalized_error(ahat.values, a.values))
    ew, ef = _tail_errors(wa), _tail_errors(wb)
    sw = _db(np.sort(wa)[::-1] / wa.max())
    sf = _db(np.sort(wb)[::-1] / wb.max())
    n = max(len(ew), len(ef))
    nan = float("nan")
    table = Table(["n_c", "sorted_wigner_db", "sorted_fourier_db", "err_wigner_db", "err_fourier_db",
                   "err_back_db"], meta=_meta(spec, s_D=len(wa), s_F=len(wb)))
    for i in range(n):
        table.append(i + 1,
                     float(sw[i]) if i < len(sw) else nan,
                     float(sf[i]) if i < len(sf) else nan,
                     float(_db(ew[i])) if i < len(ew) else nan,
                     float(_db(ef[i])) if i < len(ef) else nan,
                     float(_db(back[i])) if i < len(back) else nan)
    return table


# -- single recovery --------------------------------------------------------

def run_recovery(spec):
    """2D demo: basis pursuit (QCBP with noise) from ``rows`` random grid rows.

    Returns a table with the field SNR profile along gamma = 0; the recovery
    report and the classical full-grid comparison sit in ``table.meta``.
    """
    grid = build_grid(spec.n_max, spec.oversample, 2)
    # 400 of 1024 rows at n_max = 15; same fraction otherwise
    rows = spec.rows or int(round(grid.size * 400 / 1024))
    pm = physical_map(grid)
    spk, probe, a = preset(spec.preset, spec.n_max)
    sel = select_rows(grid, rows, seed=np.random.default_rng(trial_seed(spec.seed, 0)), pmap=pm)
    sd = noise_std_from_db(field_peak(a, grid, pm), spec.noise_db) if spec.noise_db is not None else 0.0
    ms = simulate(a, sel, sd, seed=np.random.default_rng(trial_seed(spec.seed, 1)), pmap=pm)
    a_hat, rep = recover_field(ms, a, spk, probe, radius_rule=spec.radius_rule, pmap=pm)
    full = selection_from_rows(grid, np.arange(grid.size), pm)
    a_cl = classical_inversion(simulate(a, full, 0.0, pmap=pm))
    cl_err = score(a_cl, a, spk, probe)
    beta = np.linspace(0, np.pi, spec.params.get("profile_points", 181))
    f = wigner_series(a, 0, beta, 0)
    fh = wigner_series(a_hat, 0, beta, 0)
    table = Table(["beta", "abs_field", "abs_field_hat", "field_snr_db"],
                  meta=_meta(spec, report={k: v for k, v in rep.as_dict().items() if k != "runtime"},
                             classical_full_grid_error=cl_err,
                             classical_rows=grid.size, classical_physical=pm.n_classes,
                             nyquist_note=f"classical equiangular sampling needs {NYQUIST_2D_CLASSICAL} "
                                          "measurements at n_max=15 ((2n_max+2)(n_max+1)); the torus grid "
                                          f"here has {pm.n_classes} distinct physical points"))
    with np.errstate(divide="ignore"):
        prof = 20 * np.log10(np.abs(f)) - 20 * np.log10(np.abs(f - fh))
    for row in zip(beta, np.abs(f), np.abs(fh), prof):
        table.append(*(float(v) for v in row))
    table.report = rep
    return table


# -- CS trial shared by the sweeps ------------------------------------------

def cs_trial(task):
    """One random-row CS recovery on a 2D grid.

    ``task = (preset, n_max, q, m_rows, noise_db, radius_rule, seed)``; returns
    ``(snr_db, normalized_error, m_phys, converged)``.
    """
    name, n_max, q, m_rows, noise_db, radius_rule, ss = task
    spk, probe, a = _preset_cached(name, n_max)
    grid = build_grid(n_max, q, 2)
    pm = _pmap_cached(grid)
    rng = np.random.default_rng(ss)
    sel = select_rows(grid, m_rows, seed=rng, pmap=pm)
    sd = 0.0 if noise_db is None else noise_std_from_db(_peak_cached(name, n_max, q), noise_db)
    ms = simulate(a, sel, sd, seed=rng, pmap=pm)
    _, rep = recover_field(ms, a, spk, probe, radius_rule=radius_rule, pmap=pm)
    return rep.snr_db, rep.normalized_error, rep.m_phys, rep.status == "converged"


def classical_trial(task):
    """Full-grid classical inversion with noise; ``task = (preset, n_max, q, noise_db, seed)``.

    Returns ``(snr_db, normalized_error, physical points)``.
    """
    name, n_max, q, noise_db, ss = task
    spk, probe, a = _preset_cached(name, n_max)
    grid = build_grid(n_max, q, 2)
    pm = _pmap_cached(grid)
    sd = noise_std_from_db(_peak_cached(name, n_max, q), noise_db)
    full = selection_from_rows(grid, np.arange(grid.size), pm)
    ms = simulate(a, full, sd, seed=np.random.default_rng(ss), pmap=pm)
    err = score(classical_inversion(ms), a, spk, probe)
    return snr_db(err), err, pm.n_classes


_CACHE = {}


def _preset_cached(name, n_max):
    key = ("preset", name.upper(), n_max)
    if key not in _CACHE:
        _CACHE[key] = preset(name, n_max)
    return _CACHE[key]


def _pmap_cached(grid):
    key = ("pmap", grid)
    if key not in _CACHE:
        _CACHE[key] = physical_map(grid)
    return _CACHE[key]


def _peak_cached(name, n_max, q):
    key = ("peak", name.upper(), n_max, q)
    if key not in _CACHE:
        grid = build_grid(n_max, q, 2)
        _CACHE[key] = field_peak(_preset_cached(name, n_max)[2], grid, _pmap_cached(grid))
    return _CACHE[key]


def _summarise(results):
    snr = [r[0] for r in results]
    return (mean_of(snr), mean_of(r[1] for r in results), mean_of(r[2] for r in results),
            min(snr), mean_of(float(r[3]) for r in results) if len(results[0]) > 3 else 1.0)


# -- measurement sweep ------------------------------------------------------

def run_measurement_sweep(spec):
    """Mean SNR / error versus the number of selected rows, per preset."""
    presets = spec.params.get("presets") or ["C1a", "C2a", "C3a"]
    size = build_grid(spec.n_max, spec.oversample, 2).size
    sweep = spec.params.get("rows") or ([spec.rows] if spec.rows else
                                       [int(x) for x in np.linspace(size / 8, size, 8).round()])
    tasks, keys = [], []
    for pi, name in enumerate(presets):
        for m in sweep:
            for t in range(spec.trials):
                tasks.append((name, spec.n_max, spec.oversample, int(m), spec.noise_db, spec.radius_rule,
                              trial_seed(spec.seed, pi, m, t)))
                keys.append((name, m))
    res = _map(cs_trial, tasks, spec.workers)
    table = Table(["preset", "m_rows", "mean_m_phys", "mean_error", "mean_snr_db", "min_snr_db",
                   "converged_fraction"], meta=_meta(spec, grid_rows=size))
    for name in presets:
        for m in sweep:
            rs = [r for r, k in zip(res, keys) if k == (name, m)]
            s, e, mp, lo, conv = _summarise(rs)
            table.append(name, int(m), mp, e, s, lo, conv)
    return table


# -- on-grid Wigner-D baseline ----------------------------------------------

def wigner_d_matrix(n_max, beta, gamma):
    """Rows D_n^{0m}(0, beta, gamma) over the (n, m) coefficients in (m, n) order."""
    cols = [(n, m) for m in range(-n_max, n_max + 1) for n in range(abs(m), n_max + 1)]
    ub, inv = np.unique(beta, return_inverse=True)
    out = np.empty((len(beta), len(cols)), dtype=complex)
    for j, (n, m) in enumerate(cols):
        out[:, j] = wigner_d(n, 0, m, ub)[inv] * np.exp(-1j * m * gamma)
    return out, cols


def _baseline_trial(task):
    name, n_max, m_rows, ss = task
    spk, probe, a = _preset_cached(name, n_max)
    grid = build_grid(n_max, 1, 2)
    pm = _pmap_cached(grid)
    sel = select_rows(grid, m_rows, seed=np.random.default_rng(ss), pmap=pm)
    ms = simulate(a, sel, 0.0, pmap=pm)
    _, rep = recover_field(ms, a, spk, probe, pmap=pm)
    # same physical points, sphere-domain dictionary with sqrt(sin beta) row weights
    cls = np.unique(sel.classes)
    _, beta, gamma = grid.angles(pm.representative[cls])
    w = np.sqrt(np.abs(np.sin(beta)))
    D, cols = wigner_d_matrix(n_max, beta, gamma)
    y = wigner_series(a, 0, beta, gamma)
    res = solve_qcbp(MatrixOperator(w[:, None] * D), w * y, SolverConfig.noiseless(max_iters=20000))
    a_w = WignerCoefficients(n_max)
    for (n, m), v in zip(cols, res.x):
        a_w[n, m, 0] = v
    err_w = score(a_w, a, spk, probe)
    return rep.snr_db, snr_db(err_w), rep.m_phys


def run_baseline_wignerD(spec):
    """Fourier-domain CS against direct l1 recovery in the Wigner-D dictionary."""
    size = build_grid(spec.n_max, 1, 2).size
    sweep = spec.params.get("rows") or ([spec.rows] if spec.rows else
                                       [int(x) for x in np.linspace(size / 4, size * 0.75, 5).round()])
    tasks = [(spec.preset, spec.n_max, int(m), trial_seed(spec.seed, m, t))
             for m in sweep for t in range(spec.trials)]
    res = _map(_baseline_trial, tasks, spec.workers)
    table = Table(["m_rows", "mean_m_phys", "fourier_snr_db", "wignerD_snr_db"], meta=_meta(spec))
    wins = 0
    for i, m in enumerate(sweep):
        rs = res[i * spec.trials:(i + 1) * spec.trials]
        f, w = mean_of(r[0] for r in rs), mean_of(r[1] for r in rs)
        wins += f >= w
        table.append(int(m), mean_of(r[2] for r in rs), f, w)
    table.meta["fourier_win_rate"] = wins / len(sweep)
    return table


# -- noise / grid density ---------------------------------------------------

def run_noise_density_study(spec):
    """Three arms under Gaussian noise ``noise_db`` (default -40 dB of peak).

    arm 1: classical full-grid inversion for q = 1..5;
    arm 2: CS with a fixed number of rows across q;
    arm 3: CS at a fixed sample density across q, with the classical value
    at the same q alongside.
    """
    noise_db = -40.0 if spec.noise_db is None else spec.noise_db
    name, n_max, T = spec.preset, spec.n_max, spec.trials
    qs1 = spec.params.get("q_classical", [1, 2, 3, 4, 5])
    qs = spec.params.get("q_cs", [1, 2, 3])
    arms = spec.params.get("arms", [1, 2, 3])
    m_fixed = spec.rows or 400
    density = spec.density or 1 / 3
    table = Table(["arm", "q", "m_rows", "mean_m_phys", "mean_snr_db", "classical_snr_db", "converged_fraction"],
                  meta=_meta(spec, noise_db=noise_db, density=density, fixed_rows=m_fixed))
    classical = {}

    def classical_at(q):
        if q not in classical:
            tasks = [(name, n_max, q, noise_db, trial_seed(spec.seed, 1, q, t)) for t in range(T)]
            classical[q] = _summarise(_map(classical_trial, tasks, spec.workers))
        return classical[q]

    if 1 in arms:
        for q in qs1:
            s, _, mp, _, _ = classical_at(q)
            table.append(1, q, build_grid(n_max, q, 2).size, mp, s, s, 1.0)
    for arm in (2, 3):
        if arm not in arms:
            continue
        for q in qs:
            size = build_grid(n_max, q, 2).size
            m = min(m_fixed, size) if arm == 2 else int(round(density * size))
            tasks = [(name, n_max, q, m, noise_db, spec.radius_rule, trial_seed(spec.seed, arm, q, t))
                     for t in range(T)]
            s, _, mp, _, conv = _summarise(_map(cs_trial, tasks, spec.workers))
            cl = classical_at(q)[0] if arm == 3 else float("nan")
            table.append(arm, q, m, mp, s, cl, conv)
    return table


EXPERIMENTS = {
    "sparsity": run_sparsity_study,
    "compressibility": run_compressibility_study,
    "recover": run_recovery,
    "sweep-measurements": run_measurement_sweep,
    "baseline-wignerD": run_baseline_wignerD,
    "noise-density": run_noise_density_study,
}


def run_experiment(spec):
    t0 = time.perf_counter()
    table = EXPERIMENTS[spec.experiment](spec)
    table.meta["runtime_s"] = round(time.perf_counter() - t0, 3)
    return table
