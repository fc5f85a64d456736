import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()

# -------------------- Environment Configuration --------------------
STATE_LIMIT = int(os.getenv("WF2DECLARE_STATE_LIMIT", "1000000"))
AUDIT_EVERY = int(os.getenv("WF2DECLARE_AUDIT_EVERY", "10"))
AUDIT_STATE_LIMIT = int(os.getenv("WF2DECLARE_AUDIT_STATE_LIMIT", "200000"))
BENCH_ITERATIONS = int(os.getenv("WF2DECLARE_BENCH_ITERATIONS", "200"))
SAMPLE_CAP = int(os.getenv("WF2DECLARE_SAMPLE_CAP", "20"))
LOG_LEVEL = os.getenv("WF2DECLARE_LOG_LEVEL", "WARNING").upper()

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
NETS_DIR = os.path.join(DATA_DIR, "nets")
LOGS_DIR = os.path.join(DATA_DIR, "logs")
SPECS_DIR = os.path.join(DATA_DIR, "specs")


@dataclass(frozen=True)
class Settings:
    state_limit: int = STATE_LIMIT
    audit_every: int = AUDIT_EVERY
    audit_state_limit: int = AUDIT_STATE_LIMIT
    bench_iterations: int = BENCH_ITERATIONS
    sample_cap: int = SAMPLE_CAP
    log_level: str = LOG_LEVEL


def get_settings():
    """Return the settings read from the environment"""
    return Settings()


def bundled_net(name):
    """Path of a PNML file shipped under data/nets"""
    return os.path.join(NETS_DIR, name)


def bundled_log(name):
    """Path of an event log shipped under data/logs"""
    return os.path.join(LOGS_DIR, name)


def bundled_spec(name):
    """Path of a specification file shipped under data/specs"""
    return os.path.join(SPECS_DIR, name)
