import os
from dotenv import load_dotenv

load_dotenv()

LOG_FILE = os.getenv("LOG_FILE", "achieve.log")
LOG_DIR = os.getenv("LOG_DIR", "logs")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

MAX_DIMENSION = 4

# Largest resolution k accepted per dimension n
RESOLUTION_CAPS = {
    1: int(os.getenv("RESOLUTION_CAP_1D", "1000")),
    2: int(os.getenv("RESOLUTION_CAP_2D", "32")),
    3: int(os.getenv("RESOLUTION_CAP_3D", "12")),
    4: int(os.getenv("RESOLUTION_CAP_4D", "6")),
}

CYCLE_BUDGET = int(os.getenv("CYCLE_BUDGET", "10000000"))
OBSTRUCTION_PAIR_BUDGET = int(os.getenv("OBSTRUCTION_PAIR_BUDGET", "10"))
IDEAL_STRATA_BUDGET = int(os.getenv("IDEAL_STRATA_BUDGET", "20000"))

DEFAULT_NODE_LIMIT = int(os.getenv("DEFAULT_NODE_LIMIT", "2000000"))
DEFAULT_THREADS = int(os.getenv("DEFAULT_THREADS", "1"))
SEARCH_CELL_CAP = int(os.getenv("SEARCH_CELL_CAP", "4096"))
