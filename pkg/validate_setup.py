#!/usr/bin/env python3
"""
Setup validation script for the LDOI toolkit
Run this to verify your environment is properly configured.
"""
import importlib
import sys
from pathlib import Path

REQUIRED_PACKAGES = ["numpy", "scipy", "pydantic", "dotenv", "yaml"]


def check_python_version():
    """Check Python version"""
    version = sys.version_info
    if version.major == 3 and version.minor >= 11:
        print("✅ Python version:", f"{version.major}.{version.minor}.{version.micro}")
        return True
    else:
        print("❌ Python 3.11+ required, found:", f"{version.major}.{version.minor}.{version.micro}")
        return False


def check_packages():
    """Check that runtime dependencies import"""
    missing = []
    for name in REQUIRED_PACKAGES:
        try:
            importlib.import_module(name)
        except ImportError:
            missing.append(name)
    if missing:
        print("❌ Missing packages:", ", ".join(missing))
        print("   Install with: uv sync (or pip install -e .)")
        return False
    print("✅ Required packages importable")
    return True


def check_env_file():
    """Report whether a .env file is present (optional)"""
    if Path(".env").exists():
        print("✅ .env file found")
    else:
        print("ℹ️  No .env file; using defaults (see .env.example)")
    return True


def check_configuration():
    """Validate settings loaded from the environment"""
    from src.config.settings import check_environment

    return check_environment()


def check_catalog():
    """Load and expand the witness catalog"""
    from src.utils.catalog_loader import get_catalog_loader

    loader = get_catalog_loader()
    counts = {d: len(loader.witnesses_for(d)) for d in (2, 3, 4)}
    print("✅ Witness catalog loaded:", ", ".join(f"d={d}: {n} maps" for d, n in counts.items()))
    return True


CHECKS = [
    ("Python", check_python_version),
    ("Packages", check_packages),
    (".env", check_env_file),
    ("Configuration", check_configuration),
    ("Witness catalog", check_catalog),
]


def run_checks():
    """Run every check and return the labels of the ones that failed"""
    failed = []
    for label, check in CHECKS:
        try:
            ok = check()
        except Exception as e:
            print(f"❌ {label}: {e}")
            ok = False
        if not ok:
            failed.append(label)
        print()
    return failed


def main():
    print("🔍 LDOI Toolkit Setup Validation")
    print("=" * 50)
    failed = run_checks()
    print("=" * 50)

    if not failed:
        print("🎉 All checks passed! Try: python main.py gallery")
        return 0
    print(f"⚠️  Failed: {', '.join(failed)} ({len(CHECKS) - len(failed)}/{len(CHECKS)} passed)")
    print("\nFor detailed setup instructions, see docs/project_manual.md")
    return 1


if __name__ == "__main__":
    sys.exit(main())
