"""
Environment settings for the IRS simulator
"""
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

load_dotenv()

OUTPUT_DIR = os.getenv("IRS_SIM_OUTPUT_DIR", "./results")
WORKERS = int(os.getenv("IRS_SIM_WORKERS", "1"))
LOG_LEVEL = os.getenv("IRS_SIM_LOG_LEVEL", "INFO")
PROGRESS_INTERVAL = int(os.getenv("IRS_SIM_PROGRESS_INTERVAL", "1000"))

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# Result bundle file names
DROPS_FILE = "drops.csv"
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.txt"
CDF_FILE_PATTERN = "cdf_{scheme}.csv"


def configure_logging(level: Optional[str] = None):
    """Configure root logging once for command-line use"""
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=LOG_FORMAT)


def get_output_dir(path: Optional[str] = None) -> Path:
    """
    Resolve the results directory
    Creates it if it doesn't exist
    """
    out_dir = Path(path or OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def cdf_path(results_dir: Path, scheme: str) -> Path:
    return Path(results_dir) / CDF_FILE_PATTERN.format(scheme=scheme)


def verify_results_dir(results_dir: str, schemes: Optional[List[str]] = None) -> bool:
    """
    Verify that a results directory holds the files a report needs
    """
    root = Path(results_dir)
    files: Dict[str, Path] = {"Summary": root / SUMMARY_FILE}
    for scheme in schemes or []:
        files[f"CDF {scheme}"] = cdf_path(root, scheme)

    missing = []
    for name, path in files.items():
        if not path.exists():
            missing.append(f"{name}: {path}")

    if missing:
        raise FileNotFoundError(
            "Missing result files:\n" + "\n".join(missing)
        )

    return True
