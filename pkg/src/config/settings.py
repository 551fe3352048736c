"""
Configuration settings for the LDOI toolkit
"""
import os
from pathlib import Path
from typing import List, Optional, Tuple
from dotenv import load_dotenv

load_dotenv()

_DEFAULT_CATALOG = Path(__file__).parent.parent / "registry" / "witness_catalog.yaml"


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be a number, got {raw!r}")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got {raw!r}")


class Settings:
    """Application settings loaded from environment variables"""

    def __init__(self):
        # Numerical tolerances
        self.LDOI_TOL = _float_env('LDOI_TOL', 1e-10)
        self.LDOI_REL_TOL = _float_env('LDOI_REL_TOL', 1e-9)

        # Logging
        self.LDOI_LOG_LEVEL = os.getenv('LDOI_LOG_LEVEL', 'WARNING')

        # Detection pipeline
        self.LDOI_WITNESS_CATALOG = os.getenv('LDOI_WITNESS_CATALOG', str(_DEFAULT_CATALOG))
        self.LDOI_SEED = _int_env('LDOI_SEED', 0)
        self.LDOI_FALSIFIER_SAMPLES = _int_env('LDOI_FALSIFIER_SAMPLES', 2000)
        self.LDOI_JOBS = _int_env('LDOI_JOBS', 1)

    def validate_configuration(self) -> Tuple[bool, List[str]]:
        """Validate the loaded settings.

        Returns:
            Tuple of (is_valid, list of problems)
        """
        problems = []
        if self.LDOI_TOL < 0:
            problems.append("LDOI_TOL must be non-negative")
        if self.LDOI_REL_TOL < 0:
            problems.append("LDOI_REL_TOL must be non-negative")
        if self.LDOI_FALSIFIER_SAMPLES < 0:
            problems.append("LDOI_FALSIFIER_SAMPLES must be non-negative")
        if self.LDOI_JOBS < 1:
            problems.append("LDOI_JOBS must be at least 1")
        if not Path(self.LDOI_WITNESS_CATALOG).is_file():
            problems.append(f"LDOI_WITNESS_CATALOG not found: {self.LDOI_WITNESS_CATALOG}")
        return (len(problems) == 0, problems)


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get application settings singleton"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment"""
    global _settings
    _settings = None


def check_environment() -> bool:
    """Print a report of the active configuration and return whether it is usable."""
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"❌ {e}")
        return False

    is_valid, problems = settings.validate_configuration()
    if not is_valid:
        print("❌ Invalid configuration:")
        for problem in problems:
            print(f"  - {problem}")
        print("\nPlease fix these variables in your .env file or environment.")
        return False

    print("✅ Environment configuration is valid!")
    print(f"📐 Tolerances: abs={settings.LDOI_TOL:g} rel={settings.LDOI_REL_TOL:g}")
    print(f"📚 Witness catalog: {settings.LDOI_WITNESS_CATALOG}")
    print(f"🎲 Seed: {settings.LDOI_SEED}  samples: {settings.LDOI_FALSIFIER_SAMPLES}  jobs: {settings.LDOI_JOBS}")
    return True
