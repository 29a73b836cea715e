#!/usr/bin/env python3
"""
IRS Multiple-Access Simulator
=============================
Monte-Carlo comparison of TDMA, FDMA and NOMA with and without an
intelligent reflecting surface, by sum spectral efficiency.

Usage:
    # Run the published two-user scenario with 500 drops
    python scripts/irs_sim.py run --drops 500 --seed 7 --out results/k2

    # Sixteen users from a config file, one override
    python scripts/irs_sim.py run --config k16.cfg --set reflectors=100 --out results/k16

    # Percentile table, with gains relative to the TDMA baseline
    python scripts/irs_sim.py report results/k2 --baseline tdma_noirs

    # CDF of one scheme for external plotting
    python scripts/irs_sim.py cdf results/k2 noma_irs > noma_irs.csv

Exit codes: 0 success, 1 config error, 2 runtime error.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

# Make the repository root importable when run as a script
SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(SCRIPT_DIR))

from config import settings
from config.sim_config import Scheme, config_to_flat, load_config, render_config
from tools.campaign_tools import CampaignResult, run_campaign
from tools.cdf_tools import cdf_frame
from tools.errors import ConfigError, SimulationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

FLOAT_FORMAT = "%.17g"


class CommandError(Exception):
    """Runtime failure reported to the user with exit code 2"""


# ============================================================================
# RUN
# ============================================================================

def _overrides(args) -> List[str]:
    overrides = []
    if args.drops is not None:
        overrides.append(f"drops={args.drops}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.users is not None:
        overrides.append(f"users={args.users}")
    if args.schemes is not None:
        overrides.append(f"schemes={args.schemes}")
    overrides.extend(args.set or [])
    return overrides


def write_bundle(result: CampaignResult, out_dir: Path) -> Path:
    """Write drops.csv, summary.json, config.txt and one cdf_<scheme>.csv per scheme"""
    cfg = result.config
    result.drop_rates.to_csv(out_dir / settings.DROPS_FILE, index=False, float_format=FLOAT_FORMAT)

    for scheme, samples in result.samples.items():
        cdf_frame(samples).to_csv(
            settings.cdf_path(out_dir, scheme.value), index=False, float_format=FLOAT_FORMAT
        )

    summary = {
        "config": config_to_flat(cfg),
        "drops": cfg.drops,
        "resampled_drops": result.resampled_drops,
        "schemes": {scheme.value: stats for scheme, stats in result.summaries.items()},
    }
    summary_path = out_dir / settings.SUMMARY_FILE
    with open(summary_path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")

    (out_dir / settings.CONFIG_FILE).write_text(render_config(cfg), encoding="utf-8")
    return summary_path


def cmd_run(config_path: Optional[str], overrides: List[str], out: Optional[str],
            workers: Optional[int] = None) -> Path:
    """Run a campaign and persist its results bundle"""
    cfg = load_config(config_path, overrides)
    try:
        out_dir = settings.get_output_dir(out)
    except OSError as e:
        raise CommandError(f"cannot create output directory {out}: {e}") from e

    result = run_campaign(cfg, workers=workers)
    try:
        summary_path = write_bundle(result, out_dir)
    except OSError as e:
        raise CommandError(f"cannot write results to {out_dir}: {e}") from e

    print("\n" + "=" * 60)
    print("CAMPAIGN COMPLETE")
    print("=" * 60)
    print(f"Drops:   {cfg.drops:,}")
    print(f"Schemes: {', '.join(scheme.value for scheme in cfg.schemes)}")
    print(f"Output:  {out_dir}")
    return summary_path


# ============================================================================
# REPORT / CDF
# ============================================================================

def load_summary(results_dir: str) -> dict:
    """Read summary.json, naming the file on any failure"""
    try:
        settings.verify_results_dir(results_dir)
    except FileNotFoundError as e:
        raise CommandError(str(e)) from e

    path = Path(results_dir) / settings.SUMMARY_FILE
    try:
        with open(path, "r", encoding="utf-8") as f:
            summary = json.load(f)
        schemes = summary["schemes"]
        if not isinstance(schemes, dict) or not schemes:
            raise ValueError("no schemes recorded")
        return summary
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise CommandError(f"corrupt results file {path}: {e}") from e


def report_table(summary: dict, baseline: Optional[str] = None) -> pd.DataFrame:
    """Per-scheme percentile table, best median first"""
    rows = [
        {
            "scheme": scheme,
            "likely95_bpshz": stats["likely95"],
            "likely50_bpshz": stats["likely50"],
            "mean_bpshz": stats["mean"],
            "drops": stats["count"],
        }
        for scheme, stats in summary["schemes"].items()
    ]
    table = pd.DataFrame(rows).sort_values(
        ["likely50_bpshz", "scheme"], ascending=[False, True], kind="mergesort"
    )

    if baseline is not None:
        if baseline not in summary["schemes"]:
            raise CommandError(
                f"baseline '{baseline}' not in results; available: {', '.join(sorted(summary['schemes']))}"
            )
        base = summary["schemes"][baseline]
        table["gain95"] = table["likely95_bpshz"] / base["likely95"]
        table["gain50"] = table["likely50_bpshz"] / base["likely50"]

    return table.reset_index(drop=True)


def cmd_report(results_dir: str, baseline: Optional[str] = None) -> pd.DataFrame:
    """Print the 95%-likely and 50%-likely rates of every scheme"""
    summary = load_summary(results_dir)
    table = report_table(summary, baseline)

    print("=" * 60)
    print(f"SUM SPECTRAL EFFICIENCY ({summary.get('drops', '?')} drops)")
    print("=" * 60)
    print(table.to_string(index=False, float_format=lambda value: f"{value:.3f}"))
    return table


def cmd_cdf(results_dir: str, scheme: str) -> pd.DataFrame:
    """Stream the stored CDF of one scheme as CSV on stdout"""
    summary = load_summary(results_dir)
    available = sorted(summary["schemes"])
    if scheme not in available:
        raise CommandError(f"unknown scheme '{scheme}'; available: {', '.join(available)}")

    path = settings.cdf_path(Path(results_dir), scheme)
    try:
        settings.verify_results_dir(results_dir, [scheme])
        frame = pd.read_csv(path)
    except (FileNotFoundError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise CommandError(f"cannot read {path}: {e}") from e

    frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
    return frame


# ============================================================================
# CLI
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Monte-Carlo simulator for IRS-aided TDMA, FDMA and NOMA",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/irs_sim.py run --drops 500 --out results/k2
  python scripts/irs_sim.py run --users 16 --drops 500 --out results/k16
  python scripts/irs_sim.py report results/k2 --baseline tdma_noirs
  python scripts/irs_sim.py cdf results/k2 tdma_irs
        """
    )
    parser.add_argument('--log-level', type=str, default=None, help='Logging level (default IRS_SIM_LOG_LEVEL)')
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a campaign and write a results bundle")
    run.add_argument('--config', type=str, default=None, help='Flat key = value config file')
    run.add_argument('--out', type=str, default=None, help='Output directory (default IRS_SIM_OUTPUT_DIR)')
    run.add_argument('--drops', type=int, default=None, help='Number of Monte-Carlo drops')
    run.add_argument('--seed', type=int, default=None, help='Base seed')
    run.add_argument('--users', type=int, default=None, help='Number of users K')
    run.add_argument('--schemes', type=str, default=None,
                     help=f"Comma list of: {', '.join(scheme.value for scheme in Scheme)}")
    run.add_argument('--set', action='append', metavar='KEY=VALUE', help='Override any config key (repeatable)')
    run.add_argument('--workers', type=int, default=None, help='Worker processes (default IRS_SIM_WORKERS)')

    report = sub.add_parser("report", help="Print the percentile table of a results bundle")
    report.add_argument('results_dir', type=str)
    report.add_argument('--baseline', type=str, default=None, help='Scheme to compute gain factors against')

    cdf = sub.add_parser("cdf", help="Print one scheme's CDF as CSV")
    cdf.add_argument('results_dir', type=str)
    cdf.add_argument('scheme', type=str)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings.configure_logging(args.log_level)

    try:
        if args.command == "run":
            cmd_run(args.config, _overrides(args), args.out, args.workers)
        elif args.command == "report":
            cmd_report(args.results_dir, args.baseline)
        elif args.command == "cdf":
            cmd_cdf(args.results_dir, args.scheme)
    except ConfigError as e:
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (CommandError, SimulationError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
