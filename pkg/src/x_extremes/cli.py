"""Single entry point exposing every operation as a subcommand.

Every run resolves its configuration (flag > X_EXTREMES_THREADS env var >
default), writes its outputs, and drops ``<output>.manifest.json`` echoing
the resolved config plus sha256 digests of inputs and outputs. All
randomness flows from ``--seed``; rerunning a command with the same seed
yields byte-identical outputs regardless of ``--threads``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical
failure. Errors are mirrored as one-line JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evalmetrics, io_formats, lgcp, tail, unseen
from .embedding import EmbeddingConfig, NeighborhoodSpec, deepx_metric
from .errors import NumericalError, ValidationError, XtremesError
from .parallel import resolve_threads
from .tensor import EnsembleTensor, load_tensor, save_tensor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit(2); usage errors are exit 1
        raise _UsageError(message)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def _neighborhood(args) -> NeighborhoodSpec:
    return NeighborhoodSpec(kind=args.neighborhood, radius=getattr(args, "radius", 1.0))


def _parse_pixel(text: str) -> tuple[int, int]:
    try:
        r, c = text.split(",")
        return int(r), int(c)
    except Exception as exc:
        raise ValidationError(f"pixel must be 'row,col', got {text!r}") from exc


def _add_neighborhood_flags(p) -> None:
    p.add_argument(
        "--neighborhood",
        default="moore-8",
        choices=["moore-8", "von-neumann-4", "radius-k"],
    )
    p.add_argument("--radius", type=float, default=1.0, help="radius for radius-k")


def build_parser() -> _Parser:
    parser = _Parser(prog="x-extremes", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-lgcp", help="simulate an over-dispersed count ensemble")
    p.add_argument("--output", required=True)
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int, default=16)
    p.add_argument("--gp-mean", type=float, default=0.0)
    p.add_argument("--gp-variance", type=float, default=1.0)
    p.add_argument("--spatial-length", type=float, default=2.0)
    p.add_argument("--temporal-length", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("embed", help="compute the dependence-enhanced embedding field")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--deviations", default=None, help="optional output for the deviation field")
    p.add_argument("--theta-a", type=float, default=1.0)
    p.add_argument("--theta-b", type=float, default=0.0)
    p.add_argument("--length-scale", type=float, default=1.0)
    p.add_argument("--q", type=float, default=0.90)
    p.add_argument("--chi", default=None, help="optional precomputed chi container")
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=None)
    _add_neighborhood_flags(p)

    p = sub.add_parser("chi", help="pairwise upper-tail dependence matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--q", type=float, default=0.90)
    p.add_argument("--format", choices=["container", "csv"], default="container")

    p = sub.add_parser("spectral", help="extremal-angle sample for one pixel pair")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="JSON summary path")
    p.add_argument("--pixel-a", required=True)
    p.add_argument("--pixel-b", required=True)
    p.add_argument("--radial-q", type=float, default=0.95)
    p.add_argument("--compare", default=None, help="second tensor; adds Wasserstein distance")
    p.add_argument("--angles-out", default=None, help="optional CSV of retained angles")

    p = sub.add_parser("tau", help="Kendall's tau between two pixel series")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--pixel-a", required=True)
    p.add_argument("--pixel-b", required=True)

    p = sub.add_parser("cooccur", help="distribution of concurrent threshold exceedances")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--thresholds", required=True, help="container (1,1,H,W) of per-pixel levels")
    p.add_argument("--binomial-p", type=float, default=None, help="add reference pmf column")

    p = sub.add_parser("mmd", help="unbiased squared maximum mean discrepancy")
    p.add_argument("--real", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--unit", choices=["frame", "video"], default="frame")
    p.add_argument("--sigma2", type=float, default=None)

    p = sub.add_parser("msswd", help="multi-scale sliced Wasserstein distance")
    p.add_argument("--real", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--projections", type=int, default=64)
    p.add_argument("--patch", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairwise", default=None, help="optional CSV of per-sample distances")

    p = sub.add_parser("psd", help="radially averaged power spectral density")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("moments", help="per-pixel mean and standard deviation maps")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("thresholds", help="record thresholds with rank-matched neighbors")
    p.add_argument("--reference", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--record-years", type=int, required=True)
    _add_neighborhood_flags(p)

    p = sub.add_parser("risk", help="empirical community/checkmate/stalemate probabilities")
    p.add_argument("--input", required=True)
    p.add_argument("--thresholds", required=True, help="JSON from the thresholds subcommand")
    p.add_argument("--output", required=True)
    p.add_argument("--unit", choices=["snapshot", "block"], default="snapshot")

    p = sub.add_parser("risk-analytic", help="independent / fully-dependent baselines")
    p.add_argument("--p", type=float, default=None, help="shared exceedance probability")
    p.add_argument("--p-target", type=float, default=None, help="override for the target pixel")
    p.add_argument("--record-years", type=int, default=None, help="sets p = 1/S")
    p.add_argument("--neighbors", type=int, default=8)
    p.add_argument("--fully-dependent", action="store_true")
    p.add_argument("--rows", type=int, default=None, help="grid mode: emit per-pixel CSV")
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--output", default=None, help="JSON (scalar) or CSV (grid); stdout if omitted")
    _add_neighborhood_flags(p)

    p = sub.add_parser("hotspots", help="flag high-risk pixels against 1/S and the random baseline")
    p.add_argument("--risk", required=True)
    p.add_argument("--baseline", required=True, help="risk CSV from risk-analytic grid mode")
    p.add_argument("--record-years", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--previous", default=None, help="earlier hotspot CSV; adds transition JSON")

    p = sub.add_parser("country", help="aggregate pixel risks to labeled countries")
    p.add_argument("--risk", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("correlate", help="rank-correlate country risk with an indicator")
    p.add_argument("--country", required=True)
    p.add_argument("--indicators", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--risk-column", default="p_community")
    p.add_argument("--indicator-column", default="vulnerability")
    p.add_argument("--method", choices=["kendall", "spearman"], default="kendall")

    p = sub.add_parser("verify", help="run the built-in acceptance checks")
    p.add_argument("--fast", action="store_true", help="shrink Monte-Carlo sizes")

    return parser


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_simulate_lgcp(args) -> int:
    cfg = lgcp.LgcpConfig(
        n_samples=args.samples,
        n_steps=args.steps,
        n_rows=args.rows,
        n_cols=args.cols,
        gp_mean=args.gp_mean,
        gp_variance=args.gp_variance,
        spatial_length=args.spatial_length,
        temporal_length=args.temporal_length,
        seed=args.seed,
    )
    threads = resolve_threads(args.threads)
    t = lgcp.simulate_lgcp(cfg, threads=threads)
    out = Path(args.output)
    save_tensor(t, out)
    sidecar = Path(str(out) + ".config.json")
    io_formats.json_dump(vars(cfg).copy(), sidecar)
    io_formats.write_manifest(
        out, "simulate-lgcp", {**vars(cfg), "threads": threads}, [], [out, sidecar]
    )
    return EXIT_OK


def _cmd_embed(args) -> int:
    t = load_tensor(args.input)
    cfg = EmbeddingConfig(
        theta_a=args.theta_a,
        theta_b=args.theta_b,
        length_scale=args.length_scale,
        q=args.q,
        neighborhood=_neighborhood(args),
        denominator_epsilon=args.epsilon,
    )
    threads = resolve_threads(args.threads)
    chi = None
    inputs = [args.input]
    if args.chi is not None:
        chi_t = load_tensor(args.chi)
        chi = np.where(chi_t.values[0, 0] < 0, np.nan, chi_t.values[0, 0]).astype(np.float64)
        inputs.append(args.chi)
    field = deepx_metric(t, cfg, chi=chi, threads=threads)
    out = Path(args.output)
    save_tensor(EnsembleTensor(field.values.astype(np.float32)), out)
    outputs = [out]
    if args.deviations:
        dev_path = Path(args.deviations)
        save_tensor(EnsembleTensor(field.deviations.astype(np.float32)), dev_path)
        outputs.append(dev_path)
    echo = {
        "theta_a": cfg.theta_a,
        "theta_b": cfg.theta_b,
        "length_scale": cfg.length_scale,
        "q": cfg.q,
        "neighborhood": cfg.neighborhood.kind,
        "radius": cfg.neighborhood.radius,
        "denominator_epsilon": cfg.denominator_epsilon,
        "n_guarded": field.n_guarded,
    }
    sidecar = Path(str(out) + ".config.json")
    io_formats.json_dump(echo, sidecar)
    outputs.append(sidecar)
    io_formats.write_manifest(out, "embed", {**echo, "threads": threads}, inputs, outputs)
    return EXIT_OK


def _cmd_chi(args) -> int:
    t = load_tensor(args.input)
    mat = tail.extremal_correlation(t, args.q)
    out = Path(args.output)
    if args.format == "container":
        # Undefined pairs use the sentinel -1 (chi itself lives in [0, 1]).
        payload = np.where(np.isfinite(mat.chi), mat.chi, -1.0).astype(np.float32)
        save_tensor(EnsembleTensor(payload[None, None, :, :]), out)
    else:
        n = mat.chi.shape[0]
        rows = []
        for i in range(n):
            for j in range(n):
                defined = bool(np.isfinite(mat.chi[i, j]))
                rows.append(
                    [
                        i // t.n_cols,
                        i % t.n_cols,
                        j // t.n_cols,
                        j % t.n_cols,
                        float(mat.chi[i, j]) if defined else "",
                        "true" if defined else "false",
                    ]
                )
        io_formats.write_table_csv(
            out, ["i_row", "i_col", "j_row", "j_col", "chi", "defined"], rows
        )
    io_formats.write_manifest(
        out,
        "chi",
        {"q": args.q, "format": args.format, "n_undefined_pairs": mat.n_undefined_pairs},
        [args.input],
        [out],
    )
    return EXIT_OK


def _cmd_spectral(args) -> int:
    t = load_tensor(args.input)
    pa, pb = _parse_pixel(args.pixel_a), _parse_pixel(args.pixel_b)
    sample = tail.spectral_distribution(
        t.pixel_series(*pa), t.pixel_series(*pb), radial_q=args.radial_q
    )
    summary = {
        "pixel_a": list(pa),
        "pixel_b": list(pb),
        "radial_q": args.radial_q,
        "radial_threshold": sample.radial_threshold,
        "n_total": sample.n_total,
        "n_retained": sample.n_retained,
        "mean_angle": sample.mean_angle(),
    }
    inputs = [args.input]
    if args.compare:
        other = load_tensor(args.compare)
        sample_b = tail.spectral_distribution(
            other.pixel_series(*pa), other.pixel_series(*pb), radial_q=args.radial_q
        )
        summary["wasserstein_to_compare"] = tail.spectral_wasserstein(sample, sample_b)
        summary["compare_n_retained"] = sample_b.n_retained
        inputs.append(args.compare)
    out = Path(args.output)
    io_formats.json_dump(summary, out)
    outputs = [out]
    if args.angles_out:
        io_formats.write_table_csv(
            Path(args.angles_out), ["angle"], [[float(a)] for a in np.sort(sample.angles)]
        )
        outputs.append(Path(args.angles_out))
    io_formats.write_manifest(out, "spectral", {"radial_q": args.radial_q}, inputs, outputs)
    return EXIT_OK


def _cmd_tau(args) -> int:
    t = load_tensor(args.input)
    pa, pb = _parse_pixel(args.pixel_a), _parse_pixel(args.pixel_b)
    coef, p = tail.kendall_tau(t.pixel_series(*pa), t.pixel_series(*pb))
    out = Path(args.output)
    io_formats.json_dump({"tau": coef, "p_value": p, "pixel_a": list(pa), "pixel_b": list(pb)}, out)
    io_formats.write_manifest(out, "tau", {}, [args.input], [out])
    return EXIT_OK


def _cmd_cooccur(args) -> int:
    t = load_tensor(args.input)
    thr_t = load_tensor(args.thresholds)
    if thr_t.values.shape[:2] != (1, 1):
        raise ValidationError("thresholds container must have shape (1,1,H,W)")
    probs = tail.cooccurrence_histogram(t, thr_t.values[0, 0].astype(np.float64))
    header = ["count", "probability"]
    rows: list[list] = [[k, float(p)] for k, p in enumerate(probs)]
    if args.binomial_p is not None:
        ref = tail.binomial_count_pmf(t.n_pixels, args.binomial_p)
        header.append("binomial")
        for row, r in zip(rows, ref):
            row.append(float(r))
    out = Path(args.output)
    io_formats.write_table_csv(out, header, rows)
    io_formats.write_manifest(
        out, "cooccur", {"binomial_p": args.binomial_p}, [args.input, args.thresholds], [out]
    )
    return EXIT_OK


def _cmd_mmd(args) -> int:
    real = load_tensor(args.real)
    gen = load_tensor(args.gen)
    x = evalmetrics.tensor_sample_matrix(real, unit=args.unit)
    y = evalmetrics.tensor_sample_matrix(gen, unit=args.unit)
    sigma2 = args.sigma2 if args.sigma2 is not None else evalmetrics.median_heuristic_sigma2(x, y)
    value = evalmetrics.mmd_squared(x, y, evalmetrics.KernelConfig(sigma2=sigma2))
    out = Path(args.output)
    io_formats.json_dump(
        {"mmd2": value, "sigma2": sigma2, "unit": args.unit, "m": len(x), "l": len(y)}, out
    )
    io_formats.write_manifest(
        out, "mmd", {"unit": args.unit, "sigma2": sigma2}, [args.real, args.gen], [out]
    )
    return EXIT_OK


def _cmd_msswd(args) -> int:
    real = load_tensor(args.real)
    gen = load_tensor(args.gen)
    cfg = evalmetrics.PyramidConfig(
        levels=args.levels, projections=args.projections, seed=args.seed, patch=args.patch
    )
    value = evalmetrics.ms_swd_tensor(real, gen, cfg)
    out = Path(args.output)
    io_formats.json_dump(
        {
            "msswd": value,
            "levels": cfg.levels,
            "projections": cfg.projections,
            "patch": cfg.patch,
            "seed": cfg.seed,
        },
        out,
    )
    outputs = [out]
    if args.pairwise:
        mat = evalmetrics.pairwise_ms_swd(real, gen, cfg)
        rows = [[int(i), int(j), float(mat[i, j])] for i in range(len(mat)) for j in range(len(mat))]
        io_formats.write_table_csv(Path(args.pairwise), ["sample_i", "sample_j", "msswd"], rows)
        outputs.append(Path(args.pairwise))
    io_formats.write_manifest(
        out, "msswd", {"levels": cfg.levels, "seed": cfg.seed}, [args.real, args.gen], outputs
    )
    return EXIT_OK


def _cmd_psd(args) -> int:
    t = load_tensor(args.input)
    spec = evalmetrics.radial_psd(t)
    out = Path(args.output)
    io_formats.write_table_csv(
        out,
        ["wavenumber", "power"],
        [[int(k), float(p)] for k, p in zip(spec.wavenumber, spec.power)],
    )
    io_formats.write_manifest(out, "psd", {}, [args.input], [out])
    return EXIT_OK


def _cmd_moments(args) -> int:
    t = load_tensor(args.input)
    mean, std = evalmetrics.moment_maps(t)
    rows = [
        [r, c, float(mean[r, c]), float(std[r, c])]
        for r in range(t.n_rows)
        for c in range(t.n_cols)
    ]
    out = Path(args.output)
    io_formats.write_table_csv(out, ["pixel_row", "pixel_col", "mean", "std"], rows)
    io_formats.write_manifest(out, "moments", {}, [args.input], [out])
    return EXIT_OK


def _cmd_thresholds(args) -> int:
    ref = load_tensor(args.reference)
    thr = unseen.build_thresholds(ref, args.record_years, _neighborhood(args))
    out = Path(args.output)
    io_formats.write_thresholds_json(thr, out)
    io_formats.write_manifest(
        out,
        "thresholds",
        {"record_years": args.record_years, "neighborhood": args.neighborhood},
        [args.reference],
        [out],
    )
    return EXIT_OK


def _cmd_risk(args) -> int:
    t = load_tensor(args.input)
    thr = io_formats.read_thresholds_json(args.thresholds)
    risks = unseen.empirical_risks(t, thr, unit=args.unit)
    out = Path(args.output)
    io_formats.write_risk_csv(risks, out)
    io_formats.write_manifest(
        out, "risk", {"unit": args.unit}, [args.input, args.thresholds], [out]
    )
    return EXIT_OK


def _cmd_risk_analytic(args) -> int:
    if args.p is None and args.record_years is None:
        raise ValidationError("provide --p or --record-years")
    p = args.p if args.p is not None else 1.0 / args.record_years
    p_target = args.p_target if args.p_target is not None else p
    grid_mode = args.rows is not None or args.cols is not None
    if grid_mode and (args.rows is None or args.cols is None):
        raise ValidationError("grid mode needs both --rows and --cols")

    if grid_mode:
        params = unseen.RandomProcessParams(p=p, neighborhood=_neighborhood(args))
        risks = unseen.analytic_random_risks(params, args.rows, args.cols)
        if args.output is None:
            raise ValidationError("grid mode needs --output for the CSV")
        out = Path(args.output)
        io_formats.write_risk_csv(risks, out)
        io_formats.write_manifest(
            out, "risk-analytic", {"p": p, "rows": args.rows, "cols": args.cols}, [], [out]
        )
        return EXIT_OK

    if args.fully_dependent:
        comm, check, stale = unseen.analytic_fully_dependent_triplet(p_target)
    else:
        comm, check, stale = unseen.analytic_random_triplet(p_target, p, args.neighbors)
    payload = {
        "community": comm,
        "checkmate": check,
        "stalemate": stale,
        "p_neighbor": p,
        "p_target": p_target,
        "n_neighbors": args.neighbors,
        "fully_dependent": bool(args.fully_dependent),
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.output:
        out = Path(args.output)
        out.write_text(text + "\n", encoding="utf-8")
        io_formats.write_manifest(out, "risk-analytic", payload, [], [out])
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def _cmd_hotspots(args) -> int:
    risks = io_formats.read_risk_csv(args.risk)
    baseline = io_formats.read_risk_csv(args.baseline)
    flags = unseen.classify_hotspots(risks, args.record_years, baseline)
    h, w = flags.community_high.shape
    rows = [
        [
            r,
            c,
            "true" if flags.community_high[r, c] else "false",
            "true" if flags.checkmate_above_random[r, c] else "false",
        ]
        for r in range(h)
        for c in range(w)
    ]
    out = Path(args.output)
    io_formats.write_table_csv(
        out, ["pixel_row", "pixel_col", "community_high", "checkmate_above_random"], rows
    )
    inputs = [args.risk, args.baseline]
    if args.previous:
        prev_rows = {}
        import csv as _csv

        with open(args.previous, newline="", encoding="utf-8") as fh:
            for row in _csv.DictReader(fh):
                prev_rows[(int(row["pixel_row"]), int(row["pixel_col"]))] = (
                    row["community_high"] == "true"
                )
        prev = np.zeros((h, w), dtype=bool)
        for (r, c), v in prev_rows.items():
            prev[r, c] = v
        trans = unseen.hotspot_transition(prev, flags.community_high)
        io_formats.json_dump(
            {
                "persistence": trans.persistence,
                "new_fraction": trans.new_fraction,
                "n_old": trans.n_old,
                "n_new": trans.n_new,
            },
            Path(str(out) + ".transition.json"),
        )
        inputs.append(args.previous)
    io_formats.write_manifest(out, "hotspots", {"record_years": args.record_years}, inputs, [out])
    return EXIT_OK


def _cmd_country(args) -> int:
    risks = io_formats.read_risk_csv(args.risk)
    h, w = risks.p_community.shape
    meta = io_formats.read_labels_csv(args.labels, h, w)
    rows = unseen.aggregate_country(risks, meta)
    out = Path(args.output)
    io_formats.write_country_csv(rows, out)
    io_formats.write_manifest(out, "country", {}, [args.risk, args.labels], [out])
    return EXIT_OK


def _cmd_correlate(args) -> int:
    risks = io_formats.read_country_csv(args.country, args.risk_column)
    indicators = io_formats.read_indicator_csv(args.indicators, args.indicator_column)
    res = unseen.correlate_indicator(risks, indicators, method=args.method)
    out = Path(args.output)
    io_formats.json_dump(
        {
            "coefficient": res.coefficient,
            "p_value": res.p_value,
            "n_matched": res.n_matched,
            "method": args.method,
            "risk_column": args.risk_column,
            "indicator_column": args.indicator_column,
            "unmatched_risk_countries": list(res.unmatched_left),
            "unmatched_indicator_countries": list(res.unmatched_right),
        },
        out,
    )
    io_formats.write_manifest(out, "correlate", {"method": args.method}, [args.country, args.indicators], [out])
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_checks

    ok = run_checks(fast=args.fast, stream=sys.stdout)
    return EXIT_OK if ok else EXIT_NUMERICAL


_DISPATCH = {
    "simulate-lgcp": _cmd_simulate_lgcp,
    "embed": _cmd_embed,
    "chi": _cmd_chi,
    "spectral": _cmd_spectral,
    "tau": _cmd_tau,
    "cooccur": _cmd_cooccur,
    "mmd": _cmd_mmd,
    "msswd": _cmd_msswd,
    "psd": _cmd_psd,
    "moments": _cmd_moments,
    "thresholds": _cmd_thresholds,
    "risk": _cmd_risk,
    "risk-analytic": _cmd_risk_analytic,
    "hotspots": _cmd_hotspots,
    "country": _cmd_country,
    "correlate": _cmd_correlate,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _emit_error("UsageError", str(exc))
        sys.stderr.write(parser.format_usage())
        return EXIT_USAGE
    try:
        return _DISPATCH[args.command](args)
    except ValidationError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_VALIDATION
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except XtremesError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_VALIDATION
    except OSError as exc:
        _emit_error("IOError", str(exc))
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
