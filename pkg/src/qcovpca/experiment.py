"""Benchmark harness: stratified cross-validated scheme comparison, dataset-level
spectrum reports, and the centering-strength sweep of eigenvector fidelities."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from .covariance import build_pair
from .dataio import select_pair
from .eigen import compare_spectra, eigendecompose, fidelity, overlap
from .pca import SchemePca, canonical_scheme, scheme_decomposition
from .preprocess import PartialCenteringScaler
from .svm import SmoSvc, accuracy
from .validation import as_label_vector


@dataclass
class CvConfig:
    """Cross-validation settings; folds must not exceed the smallest class count."""

    folds: int = 5
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError(f"folds must be at least 2, got {self.folds}")


@dataclass
class ReportRow:
    task: str
    scheme: str
    n_components: int
    train_mean: float
    train_std: float
    test_mean: float
    test_std: float
    folds: int
    status: str = "ok"


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)

    @property
    def failed_rows(self):
        return [r for r in self.rows if r.status != "ok"]

    def cell(self, task, scheme, n_components):
        task = str(task)
        scheme = canonical_scheme(scheme)
        for r in self.rows:
            if r.task == task and r.scheme == scheme and r.n_components == n_components:
                return r
        raise KeyError(f"no report row for ({task}, {scheme}, {n_components})")

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(
                "task,scheme,n_components,train_mean,train_std,"
                "test_mean,test_std,folds,status\n"
            )
            for r in self.rows:
                fh.write(
                    f"{r.task},{r.scheme},{r.n_components},"
                    f"{format(r.train_mean, '.17g')},{format(r.train_std, '.17g')},"
                    f"{format(r.test_mean, '.17g')},{format(r.test_std, '.17g')},"
                    f"{r.folds},{r.status}\n"
                )

    def render_table(self):
        """Plain-text accuracy table with mean(std) cells at two decimals."""
        lines = [f"{'task':<8}{'scheme':<9}{'n':>4}  {'train':<12}{'test':<12}"]
        for r in self.rows:
            if r.status == "ok":
                train = f"{r.train_mean:.2f}({r.train_std:.2f})"
                test = f"{r.test_mean:.2f}({r.test_std:.2f})"
            else:
                train = test = "--"
            lines.append(f"{r.task:<8}{r.scheme:<9}{r.n_components:>4}  {train:<12}{test:<12}")
        return "\n".join(lines)


@dataclass
class SweepRecord:
    """Eigenvector agreement at one centering strength.

    ``fid_q1_rho0``/``fid_q1_rho1`` are the squared overlaps of the leading
    classical eigenvector with the first and second quantum eigenvectors;
    the ``overlap_*`` fields carry the unsquared |dot| for the same pairs.
    """

    gamma: float
    mu_norm: float
    fid_q1_rho0: float
    fid_q1_rho1: float
    overlap_q1_rho0: float
    overlap_q1_rho1: float


@dataclass
class SpectrumReport:
    gamma: float
    mu_norm: float
    decomposition_q: object
    decomposition_rho: object
    shift0: object
    shift1: object


def make_folds(labels, cfg):
    """Deterministic (seeded) k-fold split; stratified splits keep per-class
    counts across folds within one of each other."""
    labels = as_label_vector(labels)
    m = labels.shape[0]
    rng = np.random.default_rng(cfg.seed)
    test_parts = [[] for _ in range(cfg.folds)]
    if cfg.stratified:
        for value in np.unique(labels):
            idx = np.where(labels == value)[0]
            if idx.shape[0] < cfg.folds:
                raise ValueError(
                    f"class {int(value)} has {idx.shape[0]} samples, "
                    f"fewer than {cfg.folds} folds"
                )
            rng.shuffle(idx)
            for f, chunk in enumerate(np.array_split(idx, cfg.folds)):
                test_parts[f].append(chunk)
    else:
        if m < cfg.folds:
            raise ValueError(f"{m} samples cannot fill {cfg.folds} folds")
        idx = rng.permutation(m)
        for f, chunk in enumerate(np.array_split(idx, cfg.folds)):
            test_parts[f].append(chunk)
    folds = []
    all_idx = np.arange(m)
    for parts in test_parts:
        test = np.sort(np.concatenate(parts))
        train = np.setdiff1d(all_idx, test, assume_unique=True)
        folds.append((train, test))
    return folds


def fold_mean_std(values):
    """Mean and population (divide-by-count) standard deviation."""
    v = np.asarray(values, dtype=np.float64)
    mean = float(v.mean())
    return mean, float(np.sqrt(np.mean((v - mean) ** 2)))


def _evaluate_fold(payload):
    """Train and score every (scheme, k) cell on one cross-validation fold."""
    task, samples, labels, train_idx, test_idx, fold_index, schemes, ks, gamma_hc, proto = payload
    x_train = samples[train_idx]
    x_test = samples[test_idx]
    y_train = labels[train_idx]
    y_test = labels[test_idx]
    out = []
    cache = {}
    for scheme in schemes:
        key = _scheme_cache_key(scheme, gamma_hc)
        try:
            if key not in cache:
                cache[key] = scheme_decomposition(x_train, scheme, gamma_hc)
            scaler, decomposition = cache[key]
        except Exception as exc:  # fold-level preprocessing failure
            for k in ks:
                out.append((task, scheme, k, fold_index, "failed", math.nan, math.nan, str(exc)))
            continue
        for k in ks:
            try:
                model = SchemePca._from_decomposition(scheme, k, gamma_hc, scaler, decomposition)
                z_train = model.transform(x_train)
                z_test = model.transform(x_test)
                clf = clone(proto).fit(z_train, y_train)
                out.append(
                    (
                        task,
                        scheme,
                        k,
                        fold_index,
                        "ok",
                        accuracy(y_train, clf.predict(z_train)),
                        accuracy(y_test, clf.predict(z_test)),
                        "",
                    )
                )
            except Exception as exc:
                out.append((task, scheme, k, fold_index, "failed", math.nan, math.nan, str(exc)))
    return out


def _scheme_cache_key(scheme, gamma_hc):
    # UC and UC-skip share one decomposition; the others differ by recipe
    if scheme in ("UC", "UC-skip"):
        return ("rho_bar", 0.0, True)
    if scheme == "CL":
        return ("q", 1.0, False)
    if scheme == "C":
        return ("rho_bar", 1.0, True)
    return ("rho_bar", float(gamma_hc), True)


def run_classification(
    dataset, tasks, schemes, ks, cv=None, svm=None, gamma_hc=0.95, n_workers=1
):
    """Cross-validated accuracy grid over (task, scheme, component count).

    Each fold fits the scheme's preprocessing, covariance eigenbasis, and SVM
    on the training split only. Failing cells are recorded with a message
    instead of aborting the grid. The report row order follows the input
    ``tasks``/``schemes``/``ks`` order and is identical for any worker count.
    """
    cv = cv if cv is not None else CvConfig()
    proto = svm if svm is not None else SmoSvc()
    schemes = [canonical_scheme(s) for s in schemes]
    ks = [int(k) for k in ks]
    payloads = []
    for task in tasks:
        pair = select_pair(dataset, task)
        for fold_index, (train_idx, test_idx) in enumerate(make_folds(pair.labels, cv)):
            payloads.append(
                (
                    str(task),
                    pair.samples,
                    pair.labels,
                    train_idx,
                    test_idx,
                    fold_index,
                    schemes,
                    ks,
                    gamma_hc,
                    proto,
                )
            )
    results = []
    if n_workers and n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for chunk in pool.map(_evaluate_fold, payloads):
                results.extend(chunk)
    else:
        for payload in payloads:
            results.extend(_evaluate_fold(payload))

    by_cell = {}
    for task, scheme, k, fold_index, status, train_acc, test_acc, msg in results:
        by_cell.setdefault((task, scheme, k), {})[fold_index] = (status, train_acc, test_acc, msg)

    report = ExperimentReport()
    for task in tasks:
        for scheme in schemes:
            for k in ks:
                cell = by_cell[(str(task), scheme, k)]
                folds = [cell[i] for i in sorted(cell)]
                errors = [f[3] for f in folds if f[0] != "ok"]
                if errors:
                    report.rows.append(
                        ReportRow(
                            task=str(task),
                            scheme=scheme,
                            n_components=k,
                            train_mean=math.nan,
                            train_std=math.nan,
                            test_mean=math.nan,
                            test_std=math.nan,
                            folds=cv.folds,
                            status=f"failed: {errors[0]}",
                        )
                    )
                    continue
                train_mean, train_std = fold_mean_std([f[1] for f in folds])
                test_mean, test_std = fold_mean_std([f[2] for f in folds])
                report.rows.append(
                    ReportRow(
                        task=str(task),
                        scheme=scheme,
                        n_components=k,
                        train_mean=train_mean,
                        train_std=train_std,
                        test_mean=test_mean,
                        test_std=test_std,
                        folds=cv.folds,
                    )
                )
    return report


def _preprocess_subset(dataset, task, gamma):
    pair = select_pair(dataset, task)
    scaler = PartialCenteringScaler(standardize=True, gamma=gamma, l2_normalize=True)
    return scaler.fit(pair.samples).transform(pair.samples)


def run_spectrum_report(dataset, task, gamma):
    """Dataset-level (no cross-validation) spectrum comparison of the classical
    and quantum covariance matrices at one centering strength."""
    normalized = _preprocess_subset(dataset, task, gamma)
    pair = build_pair(normalized)
    dq = eigendecompose(pair.q, source="q")
    drho = eigendecompose(pair.rho_bar, source="rho_bar")
    return SpectrumReport(
        gamma=float(gamma),
        mu_norm=float(np.linalg.norm(pair.mu)),
        decomposition_q=dq,
        decomposition_rho=drho,
        shift0=compare_spectra(dq, drho, 0),
        shift1=compare_spectra(dq, drho, 1),
    )


def run_gamma_sweep(dataset, task, grid):
    """Eigenvector fidelity of the leading classical direction against the two
    leading quantum directions, for every centering strength in ``grid``."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("gamma grid must be a non-empty 1-d sequence")
    if np.any(grid < 0.0) or np.any(grid > 1.0):
        raise ValueError("gamma grid values must lie in [0, 1]")
    records = []
    for gamma in np.sort(grid):
        normalized = _preprocess_subset(dataset, task, float(gamma))
        pair = build_pair(normalized)
        dq = eigendecompose(pair.q, source="q")
        drho = eigendecompose(pair.rho_bar, source="rho_bar")
        v_q = dq.eigenvectors[:, 0]
        records.append(
            SweepRecord(
                gamma=float(gamma),
                mu_norm=float(np.linalg.norm(pair.mu)),
                fid_q1_rho0=fidelity(v_q, drho.eigenvectors[:, 0]),
                fid_q1_rho1=fidelity(v_q, drho.eigenvectors[:, 1]),
                overlap_q1_rho0=overlap(v_q, drho.eigenvectors[:, 0]),
                overlap_q1_rho1=overlap(v_q, drho.eigenvectors[:, 1]),
            )
        )
    return records


def find_crossing(records):
    """Interpolated centering strength where the leading classical eigenvector's
    fidelity switches from the second to the first quantum eigenvector.

    Returns ``(gamma_star, mu_norm_star)`` or ``None`` when the difference
    never changes sign on the grid.
    """
    if len(records) < 2:
        raise ValueError("need at least two sweep records to locate a crossing")
    gammas = [r.gamma for r in records]
    if any(b < a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("sweep records must be sorted by gamma")
    diffs = [r.fid_q1_rho0 - r.fid_q1_rho1 for r in records]
    for i in range(len(records) - 1):
        d0, d1 = diffs[i], diffs[i + 1]
        if d0 == 0.0:
            return records[i].gamma, records[i].mu_norm
        if d0 * d1 < 0.0:
            t = d0 / (d0 - d1)
            gamma_star = records[i].gamma + t * (records[i + 1].gamma - records[i].gamma)
            mu_star = records[i].mu_norm + t * (records[i + 1].mu_norm - records[i].mu_norm)
            return float(gamma_star), float(mu_star)
    if diffs[-1] == 0.0:
        return records[-1].gamma, records[-1].mu_norm
    return None


def default_gamma_grid():
    """101 uniform points on [0, 1] plus 100 extra on [0.9, 1.0], deduplicated.

    The mean norm after normalization changes steeply near full centering, so
    the grid is densified there.
    """
    coarse = np.linspace(0.0, 1.0, 101)
    dense = np.linspace(0.9, 1.0, 100)
    return np.unique(np.concatenate([coarse, dense]))


def sweep_to_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("gamma,mu_norm,fid_q1_rho0,fid_q1_rho1,overlap_q1_rho0,overlap_q1_rho1\n")
        for r in records:
            fh.write(
                ",".join(
                    format(v, ".17g")
                    for v in (
                        r.gamma,
                        r.mu_norm,
                        r.fid_q1_rho0,
                        r.fid_q1_rho1,
                        r.overlap_q1_rho0,
                        r.overlap_q1_rho1,
                    )
                )
                + "\n"
            )
