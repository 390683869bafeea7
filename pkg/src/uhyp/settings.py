"""Process-level settings loaded from the environment"""
import os
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Configuration
CONFIG = {
    "OUTPUT_DIR": os.getenv("UHYP_OUTPUT_DIR"),
    "LOG_LEVEL": os.getenv("UHYP_LOG_LEVEL", "INFO").upper(),
    "SNAPSHOT_VERSION": 1,
    "SNAPSHOT_MAGIC": b"UHYP",
}


def output_dir_override() -> Optional[str]:
    """UHYP_OUTPUT_DIR as set right now (tests patch the environment)"""
    return os.getenv("UHYP_OUTPUT_DIR") or CONFIG["OUTPUT_DIR"]
