"""Experiment pipelines and CSV output.

Every experiment produces rows of ``sweep_value, metric, value, std_error,
trials, seed``. Analytic metrics carry ``std_error = 0`` and ``trials = 0``.
"""

import csv
import io
import logging
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .asymptotic import deterministic_equivalent
from .channel import CorrelationSet
from .config import apply_sweep_value
from .exceptions import DegenerateBoundError, ExperimentError
from .rate_mc import ergodic_sumrate_mc
from .reciprocity import calibration_residual, ergodic_mismatch, mismatch_bound
from .scenario import Layout, build_layout, compute_largescale, drop_users, realize
from .seeding import CALIBRATION, DROPS, SHADOWING, make_rng

log = logging.getLogger(__name__)

CSV_HEADER = ("sweep_value", "metric", "value", "std_error", "trials", "seed")

#: Metric names emitted per sweep point, in order.
METRICS = {
    "uplink-ergodic": ("c_mc",),
    "uplink-asymptotic-compare": ("c_mc", "c_inf", "gap"),
    "distributed-vs-collocated": ("c_inf_distributed", "c_inf_collocated", "ratio",
                                  "win_fraction"),
    "mismatch-phase-sweep": ("rate_mismatch", "rate_perfect", "rate_calibrated",
                             "normalized_loss", "bound"),
    "mismatch-amplitude-sweep": ("rate_mismatch", "rate_perfect", "rate_calibrated",
                                 "normalized_loss", "bound"),
    "calibration-check": ("max_offdiag_residual",),
}


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    metric: str
    value: float
    std_error: float
    trials: int
    seed: int


def _fmt(x):
    if x is None:
        return ""
    return format(float(x), ".12g")


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


def _uplink(s, with_inf):
    _, lsm = realize(s)
    corr = CorrelationSet.for_scenario(s)
    mc = ergodic_sumrate_mc(s, lsm, corr)
    out = [("c_mc", mc.mean, mc.std_error, mc.trials)]
    if with_inf:
        ci = deterministic_equivalent(corr, lsm, s.gamma_p, s.gamma_ul).c_inf
        out += [("c_inf", ci, 0.0, 0),
                ("gap", abs(mc.mean - ci), mc.std_error, mc.trials)]
    return out


def distributed_vs_collocated(s, drops=None):
    """Deterministic-equivalent rates of both deployments over independent user drops.

    The distributed system uses ``s.N`` RRUs of ``s.M`` antennas per cell; the
    collocated one puts all ``s.N * s.M`` antennas at the cell centre. Both
    see the same users, dropped against the distributed RRU positions.

    Returns
    -------
    (ndarray, ndarray)
        Per-drop ``c_inf`` of the distributed and collocated systems.
    """
    drops = s.num_trials if drops is None else drops
    sc = s.replace(N=1, M=s.N * s.M)
    corr_d = CorrelationSet.for_scenario(s)
    corr_c = CorrelationSet.for_scenario(sc)
    lay_d0 = build_layout(s)
    lay_c0 = build_layout(sc)
    cd, cc = np.empty(drops), np.empty(drops)
    for d in range(drops):
        lay_d = drop_users(s, lay_d0, make_rng(s.rng_seed, DROPS, d))
        lay_c = Layout(lay_c0.cell_centers, lay_c0.rru_positions, lay_c0.cell_radius,
                       lay_d.user_positions)
        lsm_d = compute_largescale(s, lay_d, make_rng(s.rng_seed, SHADOWING, d))
        lsm_c = compute_largescale(sc, lay_c, make_rng(s.rng_seed, SHADOWING, d))
        cd[d] = deterministic_equivalent(corr_d, lsm_d, s.gamma_p, s.gamma_ul).c_inf
        cc[d] = deterministic_equivalent(corr_c, lsm_c, sc.gamma_p, sc.gamma_ul).c_inf
    return cd, cc


def _dvc(s):
    cd, cc = distributed_vs_collocated(s)
    n = cd.size
    wins = float(np.mean(cd > cc))
    return [("c_inf_distributed", *_mean_se(cd), n),
            ("c_inf_collocated", *_mean_se(cc), n),
            ("ratio", *_mean_se(cd / cc), n),
            ("win_fraction", wins, float(np.sqrt(wins * (1 - wins) / n)), n)]


def _mismatch(s, cfg, rho_db):
    M, K = s.N * s.M, s.K
    rho = 10.0 ** (rho_db / 10.0)
    res = ergodic_mismatch(M, K, rho, cfg, s.num_trials, s.rng_seed)
    try:
        bound = mismatch_bound(M, K, rho, cfg).bound
    except DegenerateBoundError:
        bound = -np.inf
    n = s.num_trials
    return [("rate_mismatch", res.mismatch.mean, res.mismatch.std_error, n),
            ("rate_perfect", res.perfect.mean, res.perfect.std_error, n),
            ("rate_calibrated", res.calibrated.mean, res.calibrated.std_error, n),
            ("normalized_loss", res.loss, res.loss_std_error, n),
            ("bound", bound, 0.0, 0)]


def _calibration(s, cfg):
    M, K = s.N * s.M, s.K
    worst = max(calibration_residual(M, K, cfg, make_rng(s.rng_seed, CALIBRATION, t))
                for t in range(s.num_trials))
    return [("max_offdiag_residual", worst, 0.0, s.num_trials)]


def run_point(spec, value):
    """Metric tuples ``(name, value, std_error, trials)`` for one sweep point."""
    s, cfg, rho_db = apply_sweep_value(spec, value)
    kind = spec.kind
    if kind == "uplink-ergodic":
        return _uplink(s, with_inf=False)
    if kind == "uplink-asymptotic-compare":
        return _uplink(s, with_inf=True)
    if kind == "distributed-vs-collocated":
        return _dvc(s)
    if kind in ("mismatch-phase-sweep", "mismatch-amplitude-sweep"):
        return _mismatch(s, cfg, rho_db)
    if kind == "calibration-check":
        return _calibration(s, cfg)
    raise ValueError(f"unknown experiment kind {kind!r}")


def run_rows(spec):
    """Run every sweep point in order and collect ``ResultRow`` objects."""
    rows = []
    for value in spec.points():
        label = f"{spec.sweep_parameter}={value}" if value is not None else "single point"
        log.info("%s: %s", spec.kind, label)
        try:
            metrics = run_point(spec, value)
        except (np.linalg.LinAlgError, ArithmeticError, ValueError, RuntimeError) as exc:
            raise ExperimentError(f"{spec.kind} at {label}: {exc}") from exc
        for name, v, se, n in metrics:
            rows.append(ResultRow(value, name, float(v), float(se), int(n),
                                  spec.scenario.rng_seed))
    return rows


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow((_fmt(r.sweep_value), r.metric, _fmt(r.value), _fmt(r.std_error),
                         r.trials, r.seed))
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(spec, output_path=None):
    """Run ``spec``, write its CSV and return the rows.

    ``output_path`` overrides ``spec.output_path``; pass ``False`` to skip writing.
    """
    rows = run_rows(spec)
    path = spec.output_path if output_path is None else output_path
    if path is not False:
        write_atomic(path, rows_to_csv(rows))
    return rows
