import os

# Exit codes
EXIT_OK          = 0
EXIT_USAGE       = 2
EXIT_DOMAIN      = 3
EXIT_CONSISTENCY = 4

# Environment
ENV_CACHE_DIR = "QUADVOL_CACHE_DIR"
ENV_WORKERS   = "QUADVOL_WORKERS"

DEFAULT_CACHE_DIR = os.path.join(
    os.environ.get("XDG_DATA_HOME") or os.path.join(os.path.expanduser("~"), ".local", "share"),
    "quadvol",
)
DEFAULT_WORKERS = 1

# Output
FORMATS        = ["text", "json", "csv"]
DEFAULT_FORMAT = "text"
DEFAULT_DIGITS = 20
MAX_DIGITS     = 1000

# Logging
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ["WARNING", "INFO", "DEBUG"]

# Notes printed next to conventional values
CONVENTION_NOTES = {
    (0, 3): "Vol Q_{0,3} = 4 by convention",
    (1, 1): "Vol Q_{1,1} = 2/3 pi^2 by convention",
}

CAREA_METHODS = ["direct", "boundary", "both"]
