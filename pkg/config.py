import os

try:
    from dotenv import load_dotenv  # type: ignore
    load_dotenv()
except Exception:
    # dotenv is optional; environment variables may already be loaded
    pass


def _split_env_list(key: str, default: str = "") -> tuple[str, ...]:
    """Helper to parse comma-separated env vars into a clean tuple."""
    raw = os.environ.get(key, default) or default
    return tuple(part.strip() for part in raw.split(",") if part and part.strip())


def _env_flag(key: str, default: str = "0") -> bool:
    return os.environ.get(key, default).lower() not in ("0", "false", "no", "")


class Config:
    # --------------------------
    # Logging
    # --------------------------
    LOG_LEVEL = os.environ.get("ZETA_LOG_LEVEL", "INFO").upper()
    LOG_FORMAT = os.environ.get("ZETA_LOG_FORMAT", "%(asctime)s %(levelname)s %(name)s: %(message)s")
    # Extra loggers silenced below WARNING (sympy can be chatty when debugging)
    QUIET_LOGGERS = _split_env_list("ZETA_QUIET_LOGGERS", "sympy")

    # --------------------------
    # Pipeline
    # --------------------------
    try:
        THREADS = max(1, int(os.environ.get("ZETA_THREADS", "1")))
    except ValueError:
        THREADS = 1
    try:
        FIXED_POINT_LIMIT = int(os.environ.get("ZETA_FIXED_POINT_LIMIT", "64"))
    except ValueError:
        FIXED_POINT_LIMIT = 64
    # Re-verify p^eps h = r + D(g) + f q after every reduction (tests switch this on)
    CHECK_RECOMBINATION = _env_flag("ZETA_CHECK_RECOMBINATION")

    # --------------------------
    # Nondegeneracy witness search
    # --------------------------
    try:
        SEARCH_BOUND = int(os.environ.get("ZETA_SEARCH_BOUND", "12"))
    except ValueError:
        SEARCH_BOUND = 12
    try:
        WITNESS_SEARCH_POINTS = int(os.environ.get("ZETA_WITNESS_SEARCH_POINTS", str(2 * 10**6)))
    except ValueError:
        WITNESS_SEARCH_POINTS = 2 * 10**6

    # --------------------------
    # Oracle / reporting
    # --------------------------
    try:
        ORACLE_GUARD = int(os.environ.get("ZETA_ORACLE_GUARD", str(10**8)))
    except ValueError:
        ORACLE_GUARD = 10**8
    try:
        DEFAULT_KMAX = int(os.environ.get("ZETA_DEFAULT_KMAX", "6"))
    except ValueError:
        DEFAULT_KMAX = 6
