"""Built-in acceptance checks behind ``x-extremes verify``.

Each check re-derives its expectation from an independent route (closed
form, enumeration, or Monte Carlo with a pinned seed) and compares the
library against it. ``fast=True`` shrinks the Monte-Carlo sizes, widening
nothing: tolerances already carry the slack.
"""

from __future__ import annotations

import io
import tempfile
from pathlib import Path

import numpy as np

from . import evalmetrics, lgcp, tail, unseen
from .embedding import EmbeddingConfig, NeighborhoodSpec, baseline_metric, deepx_metric
from .tensor import EnsembleTensor, load_tensor, save_tensor


def _check_analytic_baselines(fast: bool) -> tuple[bool, str]:
    comm, check, stale = unseen.analytic_random_triplet(1 / 44, 1 / 44, 8)
    ok = (
        abs(comm - 0.1869) < 5e-4
        and abs(check - 0.1216) < 5e-4
        and abs(stale - 0.8784) < 5e-4
        and round(comm, 2) == 0.19
        and round(check, 2) == 0.12
        and round(stale, 2) == 0.88
    )
    fd = unseen.analytic_fully_dependent_triplet(1 / 44)
    ok = ok and fd == (1 / 44, 1.0, 0.0) and abs(1 / 36 - 0.02778) < 5e-6
    return ok, f"triplet=({comm:.4f},{check:.4f},{stale:.4f})"


def _check_empirical_matches_analytic(fast: bool) -> tuple[bool, str]:
    n = 10_000 if fast else 200_000
    rng = np.random.default_rng(2024)
    vals = (rng.random((n, 1, 3, 3)) < 1 / 44).astype(np.float32)
    t = EnsembleTensor(vals)
    thr = unseen.ThresholdMap(
        alpha_target=np.full((3, 3), 0.5),
        alpha_neighbor=_full_neighbor_thresholds(3, 3, 0.5),
        offsets=NeighborhoodSpec().offsets(),
        neighborhood=NeighborhoodSpec(),
        record_years=44,
        target_exceed_prob=np.full((3, 3), 1 / 44),
    )
    risks = unseen.empirical_risks(t, thr)
    comm, check, stale = unseen.analytic_random_triplet(1 / 44, 1 / 44, 8)
    tol = 0.03 if fast else 0.01
    got = (risks.p_community[1, 1], risks.p_checkmate[1, 1], risks.p_stalemate[1, 1])
    ok = abs(got[0] - comm) < tol and abs(got[1] - check) < tol and abs(got[2] - stale) < tol
    return ok, f"empirical=({got[0]:.4f},{got[1]:.4f},{got[2]:.4f})"


def _full_neighbor_thresholds(h: int, w: int, value: float) -> np.ndarray:
    nb = NeighborhoodSpec()
    alpha = np.full((h, w, len(nb.offsets())), np.nan)
    rows, cols = np.divmod(np.arange(h * w), w)
    for k, (dy, dx) in enumerate(nb.offsets()):
        r2, c2 = rows + dy, cols + dx
        ok = (r2 >= 0) & (r2 < h) & (c2 >= 0) & (c2 < w)
        alpha[rows[ok], cols[ok], k] = value
    return alpha


def _scalar_deepx(values, cfg: EmbeddingConfig, chi) -> np.ndarray:
    """Straight-line scalar re-evaluation of the embedding (oracle path)."""
    s_n, n_t, h, w = values.shape
    n = h * w
    x_all = values.reshape(s_n, n_t, n).astype(np.float64)
    pooled = x_all.reshape(s_n * n_t, n)
    big_n = s_n * n_t
    f_vals = np.empty_like(pooled)
    for p in range(n):
        col = pooled[:, p]
        for k in range(big_n):
            less = np.sum(col < col[k])
            eq = np.sum(col == col[k])
            f_vals[k, p] = (less + (eq + 1) / 2.0) / (big_n + 1.0)
    f_all = f_vals.reshape(s_n, n_t, n)
    offs = cfg.neighborhood.offsets()
    out = np.zeros((s_n, n_t, n))
    for s in range(s_n):
        x = x_all[s]
        for t_i in range(1, n_t):
            bsum = [
                sum(np.exp(-(t_i - tp) / cfg.length_scale) * x[tp, i] for tp in range(t_i))
                for i in range(n)
            ]
            den = sum(bsum)
            if abs(den) < cfg.denominator_epsilon:
                den = np.copysign(cfg.denominator_epsilon, den if den != 0 else 1.0)
            z = np.zeros(n)
            for i in range(n):
                mu_a = sum(x[t_i, j] for j in range(n)) * bsum[i] / den
                mu_b = 0.0
                if cfg.theta_b > 0:
                    acc = 0.0
                    for j in range(n):
                        k_ij = f_all[s, t_i, i] > cfg.q and f_all[s, t_i, j] > cfg.q
                        if k_ij:
                            acc += chi[i, j] * x[t_i, j]
                    mu_b = acc * bsum[i] / den
                z[i] = x[t_i, i] - (cfg.theta_a * mu_a + cfg.theta_b * mu_b)
            ssq = max(float(np.sum(z**2)), cfg.denominator_epsilon)
            for i in range(n):
                r, c = divmod(i, w)
                nb_sum = 0.0
                for dy, dx in offs:
                    r2, c2 = r + dy, c + dx
                    if 0 <= r2 < h and 0 <= c2 < w:
                        nb_sum += z[r2 * w + c2]
                out[s, t_i, i] = (n - 1) * z[i] / ssq * nb_sum
    return out.reshape(s_n, n_t, h, w)


def _check_embedding(fast: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    n_rep = 3 if fast else 10
    worst_red, worst_oracle = 0.0, 0.0
    for _ in range(n_rep):
        t = EnsembleTensor(rng.uniform(0.5, 1.5, size=(2, 5, 4, 4)).astype(np.float32))
        cfg = EmbeddingConfig(theta_a=0.5, theta_b=0.5, length_scale=1.0, q=0.9)
        chi = rng.uniform(0, 1, size=(16, 16))
        chi = 0.5 * (chi + chi.T)
        full = deepx_metric(t, cfg, chi=chi)
        oracle = _scalar_deepx(t.values, cfg, chi)
        worst_oracle = max(worst_oracle, float(np.abs(full.values - oracle).max()))
        cfg0 = EmbeddingConfig(theta_a=1.0, theta_b=0.0, length_scale=1.0, q=0.9)
        red = deepx_metric(t, cfg0, chi=None)
        base = baseline_metric(t, cfg0)
        worst_red = max(worst_red, float(np.abs(red.values - base.values).max()))
    ok = worst_red <= 1e-12 and worst_oracle <= 1e-10
    return ok, f"reduction gap {worst_red:.2e}, oracle gap {worst_oracle:.2e}"


def _check_tail(fast: bool) -> tuple[bool, str]:
    n = 20_000 if fast else 200_000
    rng = np.random.default_rng(11)
    x = rng.random(n)
    chi_dep = tail.chi_pair(x, 10 * x + 3, q=0.9)
    chi_ind = tail.chi_pair(rng.random(n), rng.random(n), q=0.9)
    spec = tail.spectral_distribution(x, 2 * x, radial_q=0.99)
    ind = tail.spectral_distribution(rng.random(n), rng.random(n), radial_q=0.95)
    outside = float(np.mean((ind.angles < 0.2) | (ind.angles > 0.8)))
    ok = (
        chi_dep == 1.0
        and abs(chi_ind - 0.10) < 0.02
        and abs(spec.mean_angle() - 0.5) <= 0.05
        and outside >= 0.80
    )
    return ok, f"chi_ind={chi_ind:.3f}, outside={outside:.2f}"


def _check_eval_battery(fast: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(5)
    m = 200 if fast else 500
    reps = 5 if fast else 20
    vals = []
    for _ in range(reps):
        z = rng.standard_normal((2 * m, 4))
        vals.append(evalmetrics.mmd_squared(z[:m], z[m:], evalmetrics.KernelConfig(sigma2=2.0)))
    mmd_avg = abs(float(np.mean(vals)))
    imgs = rng.standard_normal((6, 16, 16))
    swd_zero = evalmetrics.ms_swd(imgs, imgs.copy(), evalmetrics.PyramidConfig(levels=2, seed=3))
    t = EnsembleTensor(rng.standard_normal((2, 3, 16, 16)).astype(np.float32))
    parseval = evalmetrics.parseval_residual(t)
    n_snap = 20_000 if fast else 100_000
    field = (rng.random((n_snap, 1, 5, 5)) < 0.01).astype(np.float32)
    hist = tail.cooccurrence_histogram(EnsembleTensor(field), np.full((5, 5), 0.5))
    tv = tail.total_variation(hist, tail.binomial_count_pmf(25, 0.01))
    ok = mmd_avg < 1e-3 and swd_zero <= 1e-9 and parseval <= 1e-8 and tv < 0.02
    return ok, f"mmd_avg={mmd_avg:.1e}, swd0={swd_zero:.1e}, parseval={parseval:.1e}, tv={tv:.4f}"


def _check_lgcp(fast: bool) -> tuple[bool, str]:
    n_s = 20 if fast else 100
    cfg = lgcp.LgcpConfig(
        n_samples=n_s, n_steps=10, n_rows=10, n_cols=10,
        gp_mean=np.log(4.0), gp_variance=1e-12, spatial_length=1.0, temporal_length=1.0, seed=1,
    )
    t = lgcp.simulate_lgcp(cfg)
    disp = lgcp.empirical_dispersion(t)
    cfg2 = lgcp.LgcpConfig(
        n_samples=n_s, n_steps=10, n_rows=10, n_cols=10,
        gp_mean=0.0, gp_variance=1.0, spatial_length=1.0, temporal_length=1.0, seed=2,
    )
    t2 = lgcp.simulate_lgcp(cfg2)
    mean2 = float(np.mean(t2.values))
    disp2 = lgcp.empirical_dispersion(t2)
    target = float(np.exp(0.5))
    ok = 0.97 <= disp <= 1.03 and abs(mean2 - target) / target < 0.05 and disp2 > 1.0
    return ok, f"disp0={disp:.3f}, mean1={mean2:.3f} (target {target:.3f}), disp1={disp2:.2f}"


def _check_normalization(fast: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(3)
    vals = (rng.random((3000, 2, 4, 4)) < 0.05).astype(np.float32)
    t = EnsembleTensor(vals)
    thr = unseen.ThresholdMap(
        alpha_target=np.full((4, 4), 0.5),
        alpha_neighbor=_full_neighbor_thresholds(4, 4, 0.5),
        offsets=NeighborhoodSpec().offsets(),
        neighborhood=NeighborhoodSpec(),
        record_years=20,
        target_exceed_prob=np.full((4, 4), 0.05),
    )
    risks = unseen.empirical_risks(t, thr)
    gap = float(np.nanmax(np.abs(risks.p_checkmate + risks.p_stalemate - 1.0)))
    ok = gap <= 1e-12
    return ok, f"max |check+stale-1| = {gap:.1e}"


def _check_roundtrip(fast: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(9)
    t = EnsembleTensor(rng.standard_normal((2, 3, 4, 4)).astype(np.float32))
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "t.xt"
        save_tensor(t, path)
        back = load_tensor(path)
        save_tensor(back, Path(tmp) / "t2.xt")
        ok = np.array_equal(
            t.values.view(np.uint32), back.values.view(np.uint32)
        ) and path.read_bytes() == (Path(tmp) / "t2.xt").read_bytes()
    return ok, "bitwise round trip"


CHECKS = [
    ("analytic-risk-baselines", _check_analytic_baselines),
    ("empirical-matches-analytic", _check_empirical_matches_analytic),
    ("embedding-reduction-and-oracle", _check_embedding),
    ("tail-dependence-properties", _check_tail),
    ("evaluation-battery", _check_eval_battery),
    ("lgcp-dispersion", _check_lgcp),
    ("risk-normalization-identity", _check_normalization),
    ("container-round-trip", _check_roundtrip),
]


def run_checks(fast: bool = False, stream: io.TextIOBase | None = None) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        ok, detail = fn(fast)
        all_ok &= ok
        if stream is not None:
            stream.write(f"{'PASS' if ok else 'FAIL'}  {name:34s} {detail}\n")
    if stream is not None:
        stream.write(("all checks passed" if all_ok else "SOME CHECKS FAILED") + "\n")
    return all_ok
