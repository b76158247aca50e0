"""Record-breaking ("unseen") extreme-event risk probabilities.

For a target pixel with record threshold alpha_target and neighbors held to
equal-severity thresholds, each snapshot is classified as:

    community: the target or any neighbor is at/above its threshold,
    checkmate: the target itself is at/above its threshold,
    stalemate: some neighbor is, while the target is not.

Normalized checkmate and stalemate probabilities share the community count
as denominator, so they sum to exactly 1 wherever the community count is
positive; pixels with zero community hits are reported as undefined, never
imputed. Closed forms for spatially independent and fully synchronized
exceedances serve as reference baselines.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .embedding import NeighborhoodSpec
from .errors import ValidationError
from .tensor import EnsembleTensor, GridMeta


@dataclass(frozen=True)
class ThresholdMap:
    """Record thresholds: per-pixel maxima plus rank-matched neighbor levels.

    alpha_neighbor[r, c, k] is the threshold applied to the neighbor at
    offset ``offsets[k]`` of target (r, c): the neighbor's own value at the
    same exceedance rank the target's record holds, so severity (return
    level) is equalized inside each neighborhood. NaN marks offsets that
    fall off the grid.
    """

    alpha_target: np.ndarray
    alpha_neighbor: np.ndarray
    offsets: tuple[tuple[int, int], ...]
    neighborhood: NeighborhoodSpec
    record_years: int
    target_exceed_prob: np.ndarray

    def __post_init__(self):
        h, w = self.alpha_target.shape
        if self.alpha_neighbor.shape != (h, w, len(self.offsets)):
            raise ValidationError("alpha_neighbor must be (rows, cols, n_offsets)")
        if self.record_years < 1:
            raise ValidationError("record length must be >= 1 year")

    @property
    def n_rows(self) -> int:
        return self.alpha_target.shape[0]

    @property
    def n_cols(self) -> int:
        return self.alpha_target.shape[1]


def build_thresholds(
    reference: EnsembleTensor, record_years: int, nb: NeighborhoodSpec = NeighborhoodSpec()
) -> ThresholdMap:
    """Derive record thresholds from a reference ensemble.

    The target threshold is the pixel's pooled maximum; its empirical
    exceedance probability (>=, ties counted) fixes a rank, and each
    neighbor's threshold is the value at that same rank in the neighbor's
    own pooled record.
    """
    pooled = reference.pooled_matrix()  # (N, n)
    n_obs = pooled.shape[0]
    if record_years < 1:
        raise ValidationError("record length must be >= 1 year")
    if n_obs < record_years:
        raise ValidationError(
            f"reference has {n_obs} snapshots, fewer than {record_years} record blocks"
        )
    h, w = reference.n_rows, reference.n_cols
    flat_const = pooled.min(axis=0) == pooled.max(axis=0)
    if flat_const.any():
        r, c = divmod(int(np.flatnonzero(flat_const)[0]), w)
        raise ValidationError(f"degenerate constant pixel at ({r},{c}): record rank undefined")
    alpha_target = pooled.max(axis=0)
    tie_counts = (pooled >= alpha_target[None, :]).sum(axis=0)  # rank of the record, >= 1
    sorted_desc = -np.sort(-pooled, axis=0)  # (N, n) descending per pixel
    offsets = nb.offsets()
    alpha_nb = np.full((h, w, len(offsets)), np.nan)
    rows, cols = np.divmod(np.arange(h * w), w)
    for k, (dy, dx) in enumerate(offsets):
        r2, c2 = rows + dy, cols + dx
        ok = (r2 >= 0) & (r2 < h) & (c2 >= 0) & (c2 < w)
        nb_pix = (r2 * w + c2)[ok]
        ranks = tie_counts[ok] - 1
        alpha_nb[rows[ok], cols[ok], k] = sorted_desc[ranks, nb_pix]
    return ThresholdMap(
        alpha_target=alpha_target.reshape(h, w),
        alpha_neighbor=alpha_nb,
        offsets=offsets,
        neighborhood=nb,
        record_years=record_years,
        target_exceed_prob=(tie_counts / n_obs).reshape(h, w),
    )


@dataclass(frozen=True)
class RiskField:
    """Per-pixel risk probabilities with explicit missingness.

    ``p_checkmate``/``p_stalemate`` are normalized by the community count
    and are NaN where no community hit was observed (``defined`` False).
    """

    p_community: np.ndarray
    p_checkmate: np.ndarray
    p_stalemate: np.ndarray
    p_target_unnorm: np.ndarray
    p_stalemate_unnorm: np.ndarray
    community_counts: np.ndarray
    n_snapshots: int
    defined: np.ndarray = field(init=False)

    def __post_init__(self):
        defined = np.isfinite(self.p_checkmate)
        object.__setattr__(self, "defined", defined)
        for name in ("p_community", "p_target_unnorm", "p_stalemate_unnorm"):
            arr = getattr(self, name)
            if np.any((arr < 0) | (arr > 1)):
                raise ValidationError(f"{name} must lie in [0, 1]")
        both = defined & np.isfinite(self.p_stalemate)
        if both.any():
            gap = np.abs(self.p_checkmate[both] + self.p_stalemate[both] - 1.0)
            if gap.max() > 1e-12:
                raise ValidationError(
                    f"checkmate + stalemate must sum to 1 where defined (max gap {gap.max():.3e})"
                )


def _neighbor_hits(snaps: np.ndarray, thr: ThresholdMap) -> np.ndarray:
    """(N, H, W) booleans: any in-grid neighbor at/above its matched threshold."""
    n, h, w = snaps.shape
    hit = np.zeros((n, h, w), dtype=bool)
    for k, (dy, dx) in enumerate(thr.offsets):
        alpha = thr.alpha_neighbor[:, :, k]
        valid = np.isfinite(alpha)
        if not valid.any():
            continue
        # Value seen by target (r, c) is the neighbor at (r+dy, c+dx).
        shifted = np.full_like(snaps, -np.inf)
        src_r = slice(max(dy, 0), h + min(dy, 0))
        src_c = slice(max(dx, 0), w + min(dx, 0))
        dst_r = slice(max(-dy, 0), h + min(-dy, 0))
        dst_c = slice(max(-dx, 0), w + min(-dx, 0))
        shifted[:, dst_r, dst_c] = snaps[:, src_r, src_c]
        hit |= valid[None, :, :] & (shifted >= np.where(valid, alpha, np.inf)[None, :, :])
    return hit


def empirical_risks(
    ensemble: EnsembleTensor,
    thr: ThresholdMap,
    nb: NeighborhoodSpec | None = None,
    unit: str = "snapshot",
) -> RiskField:
    """Count-based risk probabilities over an ensemble.

    ``unit='snapshot'`` treats every (sample, step) frame as one trial;
    ``unit='block'`` first reduces each sample to its per-pixel maximum
    (annual-exceedance reading when one sample spans one year).
    """
    if (ensemble.n_rows, ensemble.n_cols) != (thr.n_rows, thr.n_cols):
        raise ValidationError(
            f"ensemble grid {(ensemble.n_rows, ensemble.n_cols)} does not match "
            f"threshold grid {(thr.n_rows, thr.n_cols)}"
        )
    if nb is not None and nb != thr.neighborhood:
        raise ValidationError("neighborhood spec disagrees with the threshold map")
    if unit == "snapshot":
        snaps = ensemble.values.reshape(-1, ensemble.n_rows, ensemble.n_cols).astype(np.float64)
    elif unit == "block":
        snaps = ensemble.values.max(axis=1).astype(np.float64)
    else:
        raise ValidationError(f"unit must be 'snapshot' or 'block', got {unit!r}")
    hit_target = snaps >= thr.alpha_target[None, :, :]
    hit_nb = _neighbor_hits(snaps, thr)
    n = len(snaps)
    target_counts = hit_target.sum(axis=0)
    stale_counts = (hit_nb & ~hit_target).sum(axis=0)
    comm_counts = target_counts + stale_counts  # target-or-neighbor, exact by disjointness
    with np.errstate(invalid="ignore", divide="ignore"):
        p_check = np.where(comm_counts > 0, target_counts / comm_counts, np.nan)
        p_stale = np.where(comm_counts > 0, stale_counts / comm_counts, np.nan)
    return RiskField(
        p_community=comm_counts / n,
        p_checkmate=p_check,
        p_stalemate=p_stale,
        p_target_unnorm=target_counts / n,
        p_stalemate_unnorm=stale_counts / n,
        community_counts=comm_counts,
        n_snapshots=n,
    )


# ---------------------------------------------------------------------------
# Closed-form baselines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomProcessParams:
    """Independent-exceedance reference process.

    ``p`` is either a scalar (shared by target and neighbors) or an
    (H, W) grid of per-pixel exceedance probabilities; the default 1/S is
    the expected chance of beating an S-year record in a fresh draw.
    """

    p: np.ndarray | float
    neighborhood: NeighborhoodSpec = NeighborhoodSpec()

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=np.float64)
        if np.any((arr <= 0) | (arr >= 1)):
            raise ValidationError("exceedance probabilities must lie in (0, 1)")


def analytic_random_triplet(
    p_target: float, p_neighbor: float, n_neighbors: int
) -> tuple[float, float, float]:
    """(community, checkmate, stalemate) for one target with independent pixels."""
    if n_neighbors < 1:
        raise ValidationError("neighborhood must hold at least one pixel")
    if not (0.0 < p_target <= 1.0) or not (0.0 < p_neighbor < 1.0):
        raise ValidationError("probabilities out of range")
    miss_all_nb = (1.0 - p_neighbor) ** n_neighbors
    p_comm = 1.0 - miss_all_nb * (1.0 - p_target)
    p_check = p_target / p_comm
    p_stale = (1.0 - miss_all_nb) * (1.0 - p_target) / p_comm
    return p_comm, p_check, p_stale


def analytic_random_risks(params: RandomProcessParams, n_rows: int, n_cols: int) -> RiskField:
    """Gridwise independent-process baseline with boundary-truncated |N|."""
    p = np.broadcast_to(np.asarray(params.p, dtype=np.float64), (n_rows, n_cols))
    offsets = params.neighborhood.offsets()
    miss = np.ones((n_rows, n_cols))
    rows, cols = np.divmod(np.arange(n_rows * n_cols), n_cols)
    count_nb = np.zeros(n_rows * n_cols, dtype=int)
    miss = miss.ravel()
    for dy, dx in offsets:
        r2, c2 = rows + dy, cols + dx
        ok = (r2 >= 0) & (r2 < n_rows) & (c2 >= 0) & (c2 < n_cols)
        miss[ok] *= 1.0 - p.ravel()[(r2 * n_cols + c2)[ok]]
        count_nb += ok
    if (count_nb < 1).any():
        raise ValidationError("a pixel has an empty truncated neighborhood")
    miss = miss.reshape(n_rows, n_cols)
    p_comm = 1.0 - miss * (1.0 - p)
    p_check = p / p_comm
    p_stale = (1.0 - miss) * (1.0 - p) / p_comm
    return RiskField(
        p_community=p_comm,
        p_checkmate=p_check,
        p_stalemate=p_stale,
        p_target_unnorm=p,
        p_stalemate_unnorm=(1.0 - miss) * (1.0 - p),
        community_counts=np.full((n_rows, n_cols), -1, dtype=int),  # analytic: no counts
        n_snapshots=0,
    )


def analytic_fully_dependent_triplet(p_target: float) -> tuple[float, float, float]:
    """All pixels exceed together: community = p, checkmate = 1, stalemate = 0."""
    if not (0.0 < p_target <= 1.0):
        raise ValidationError("probability out of range")
    return p_target, 1.0, 0.0


# ---------------------------------------------------------------------------
# Hotspot classification and aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HotspotFlags:
    community_high: np.ndarray
    checkmate_above_random: np.ndarray


def classify_hotspots(risks: RiskField, record_years: int, baseline: RiskField) -> HotspotFlags:
    """Flag pixels whose community risk beats 1/S and whose normalized
    checkmate risk beats the independent-process baseline."""
    if risks.p_community.shape != baseline.p_community.shape:
        raise ValidationError("risk and baseline grids must match")
    community_high = risks.p_community > 1.0 / record_years
    both = risks.defined & baseline.defined
    above = np.zeros_like(community_high, dtype=bool)
    above[both] = risks.p_checkmate[both] > baseline.p_checkmate[both]
    return HotspotFlags(community_high=community_high, checkmate_above_random=above)


@dataclass(frozen=True)
class HotspotTransition:
    persistence: float  # share of old hotspots still flagged
    new_fraction: float  # share of new hotspots absent before
    n_old: int
    n_new: int


def hotspot_transition(old: np.ndarray, new: np.ndarray) -> HotspotTransition:
    old = np.asarray(old, dtype=bool)
    new = np.asarray(new, dtype=bool)
    if old.shape != new.shape:
        raise ValidationError("flag grids must match")
    n_old, n_new = int(old.sum()), int(new.sum())
    if n_old == 0 or n_new == 0:
        raise ValidationError("transition undefined without hotspots on both sides")
    return HotspotTransition(
        persistence=float((old & new).sum() / n_old),
        new_fraction=float((new & ~old).sum() / n_new),
        n_old=n_old,
        n_new=n_new,
    )


@dataclass(frozen=True)
class CountryRisk:
    country_id: str
    n_pixels: int
    n_defined: int
    p_community: float
    p_checkmate: float  # NaN if no pixel in the country has a defined value
    p_stalemate: float


def aggregate_country(risks: RiskField, meta: GridMeta) -> list[CountryRisk]:
    """Unweighted pixel means per labeled country; needs >= 2 pixels each.

    Undefined normalized risks are excluded from their mean with the count
    reported; countries below the pixel floor are dropped with a warning.
    """
    if meta.pixel_labels is None:
        raise ValidationError("grid metadata has no pixel labels")
    if meta.pixel_labels.shape != risks.p_community.shape:
        raise ValidationError("label grid does not match the risk grid")
    labels = meta.pixel_labels
    ids = sorted({str(v) for v in labels.ravel() if v is not None})
    rows: list[CountryRisk] = []
    for cid in ids:
        mask = np.vectorize(lambda v: v is not None and str(v) == cid)(labels)
        n_pix = int(mask.sum())
        if n_pix < 2:
            warnings.warn(f"country {cid!r} covers {n_pix} pixel(s); excluded (needs >= 2)")
            continue
        def_mask = mask & risks.defined
        n_def = int(def_mask.sum())
        rows.append(
            CountryRisk(
                country_id=cid,
                n_pixels=n_pix,
                n_defined=n_def,
                p_community=float(risks.p_community[mask].mean()),
                p_checkmate=float(risks.p_checkmate[def_mask].mean()) if n_def else float("nan"),
                p_stalemate=float(risks.p_stalemate[def_mask].mean()) if n_def else float("nan"),
            )
        )
    return rows


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    p_value: float
    n_matched: int
    unmatched_left: tuple[str, ...]
    unmatched_right: tuple[str, ...]


def correlate_indicator(
    country_risks: dict[str, float], indicators: dict[str, float], method: str = "kendall"
) -> CorrelationResult:
    """Rank correlation between per-country risk and an external indicator."""
    if method not in ("kendall", "spearman"):
        raise ValidationError(f"method must be 'kendall' or 'spearman', got {method!r}")
    shared = sorted(set(country_risks) & set(indicators))
    shared = [c for c in shared if np.isfinite(country_risks[c]) and np.isfinite(indicators[c])]
    if len(shared) < 10:
        raise ValidationError(f"only {len(shared)} countries join; need >= 10")
    a = np.array([country_risks[c] for c in shared])
    b = np.array([indicators[c] for c in shared])
    if method == "kendall":
        res = stats.kendalltau(a, b, variant="b", method="asymptotic")
    else:
        res = stats.spearmanr(a, b)
    return CorrelationResult(
        coefficient=float(res.statistic),
        p_value=float(res.pvalue),
        n_matched=len(shared),
        unmatched_left=tuple(sorted(set(country_risks) - set(indicators))),
        unmatched_right=tuple(sorted(set(indicators) - set(country_risks))),
    )
