"""
Monte-Carlo campaign tools - user placement, per-drop seeding, parallel drops
and aggregation

Every drop owns a random stream derived from (base_seed, drop_index), so a
campaign is a pure function of its SimConfig whatever the worker count.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from config import settings
from config.sim_config import Geometry, Scheme, SimConfig
from tools.access_tools import SchemeResult, evaluate_scheme
from tools.cdf_tools import summarize_rates
from tools.channel_tools import realize_drop
from tools.errors import CollocatedUserError, DegenerateChannelError, DomainError, SimulationError

logger = logging.getLogger(__name__)

MAX_DROP_ATTEMPTS = 10
RESAMPLE_FRACTION = 0.001


@dataclass(frozen=True)
class DropResult:
    drop_index: int
    results: Dict[Scheme, SchemeResult]
    resamples: int = 0


@dataclass
class CampaignResult:
    config: SimConfig
    samples: Dict[Scheme, np.ndarray]
    summaries: Dict[Scheme, Dict[str, float]]
    drop_rates: pd.DataFrame
    resampled_drops: int = 0
    drops: List[DropResult] = field(default_factory=list, repr=False)


def drop_seed(base_seed: int, drop_index: int, attempt: int = 0) -> int:
    """Stable 64-bit seed for one drop attempt"""
    sequence = np.random.SeedSequence([base_seed, drop_index, attempt])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def place_users(rng: np.random.Generator, geometry: Geometry, k: int) -> np.ndarray:
    """
    Uniform user placement: ceil(k/2) users in the cell-center square,
    floor(k/2) in the cell-edge square (center users first)
    """
    if k < 1:
        raise DomainError(f"need at least one user, got {k}")
    n_center = math.ceil(k / 2)
    points = []
    for area, count in ((geometry.center_area, n_center), (geometry.edge_area, k - n_center)):
        corner = np.array([area.x, area.y])
        points.append(corner + rng.uniform(0.0, area.side, size=(count, 2)))
    return np.vstack(points)


def run_drop(drop_index: int, cfg: SimConfig) -> DropResult:
    """
    Place users, realize one ChannelSet and evaluate every requested scheme on it
    A degenerate drop is redrawn from the next attempt's stream.
    """
    for attempt in range(MAX_DROP_ATTEMPTS):
        rng = np.random.default_rng(drop_seed(cfg.base_seed, drop_index, attempt))
        try:
            locations = place_users(rng, cfg.geometry, cfg.n_users)
            channels = realize_drop(rng, cfg, locations)
            results = {scheme: evaluate_scheme(scheme, channels, cfg) for scheme in cfg.schemes}
        except (DegenerateChannelError, CollocatedUserError) as exc:
            logger.warning(f"Drop {drop_index} attempt {attempt} is degenerate ({exc}); resampling")
            continue
        return DropResult(drop_index=drop_index, results=results, resamples=attempt)

    raise SimulationError(f"drop {drop_index} stayed degenerate after {MAX_DROP_ATTEMPTS} attempts")


def _drop_table(drops: List[DropResult], schemes) -> pd.DataFrame:
    rows = [
        {"drop": drop.drop_index, "scheme": Scheme(scheme).value, "sum_rate_bpshz": drop.results[scheme].sum_rate}
        for drop in drops
        for scheme in schemes
    ]
    return pd.DataFrame(rows, columns=["drop", "scheme", "sum_rate_bpshz"])


def run_campaign(cfg: SimConfig, workers: Optional[int] = None) -> CampaignResult:
    """
    Run every drop of a campaign and aggregate per-scheme samples

    Args:
        cfg: Campaign configuration (drops, seed, schemes, scenario)
        workers: Worker processes; defaults to IRS_SIM_WORKERS

    Returns:
        CampaignResult with ascending samples and percentile summaries
    """
    workers = max(1, workers or settings.WORKERS)
    logger.info(f"Running {cfg.drops:,} drops with K={cfg.n_users}, N={cfg.n_reflectors}, "
                f"N_b={cfg.n_bs_antennas} on {workers} worker(s)")

    task = partial(run_drop, cfg=cfg)
    drops: List[DropResult] = []
    start_time = time.monotonic()

    def track(results):
        for drop in results:
            drops.append(drop)
            done = len(drops)
            if done % settings.PROGRESS_INTERVAL == 0 or done == cfg.drops:
                elapsed = time.monotonic() - start_time
                rate = done / elapsed if elapsed > 0 else 0.0
                eta = (cfg.drops - done) / rate if rate > 0 else 0.0
                logger.info(f"{done:,}/{cfg.drops:,} drops ({done / cfg.drops * 100:.1f}%) "
                            f"- {rate:.0f} drops/sec - ETA: {eta:.0f} s")

    if workers == 1:
        track(map(task, range(cfg.drops)))
    else:
        chunksize = max(1, cfg.drops // (workers * 8))
        with Pool(workers) as pool:
            track(pool.imap(task, range(cfg.drops), chunksize=chunksize))

    drops.sort(key=lambda drop: drop.drop_index)
    resampled = sum(drop.resamples for drop in drops)
    allowed = max(1, math.ceil(RESAMPLE_FRACTION * cfg.drops))
    if resampled > allowed:
        raise SimulationError(f"{resampled} degenerate resamples exceed the bound of {allowed}")

    samples = {
        scheme: np.sort(np.array([drop.results[scheme].sum_rate for drop in drops]))
        for scheme in cfg.schemes
    }
    summaries = {scheme: summarize_rates(values) for scheme, values in samples.items()}

    return CampaignResult(
        config=cfg,
        samples=samples,
        summaries=summaries,
        drop_rates=_drop_table(drops, cfg.schemes),
        resampled_drops=resampled,
        drops=drops,
    )
