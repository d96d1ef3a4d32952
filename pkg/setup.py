#!/usr/bin/env python3
"""
Setup script for the turnover toolkit: installs requirements, prepares the
output and log directories named in config.yaml and runs two smoke checks.
"""
import importlib
import os
import sys
import subprocess
from pathlib import Path

REQUIRED_MODULES = ("numpy", "networkx", "yaml", "dotenv", "pydantic", "colorama")

SMOKE_COMMANDS = (
    ("inclusion table", ["lattice", "table"]),
    ("ideal tetrahedron", ["realize", "2,6,3;2,6,3"]),
)


def print_header(text):
    print("\n" + "="*80)
    print(f"  {text}")
    print("="*80 + "\n")


def check_python_version():
    print("Checking Python version...")
    major, minor = sys.version_info[:2]
    if (major, minor) < (3, 12):
        print(f"❌ Python 3.12 or newer required, found {major}.{minor}")
        return False
    print(f"✓ Python {major}.{minor}")
    cores = os.cpu_count() or 1
    print(f"✓ {cores} cores available (threads: 0 in config.yaml uses all of them)")
    return True


def install_dependencies():
    print("\nInstalling requirements.txt...")
    completed = subprocess.run([sys.executable, "-m", "pip", "install", "-q", "-r", "requirements.txt"])
    if completed.returncode != 0:
        print("❌ pip failed, see the output above")
        return False

    missing = []
    for name in REQUIRED_MODULES:
        try:
            importlib.import_module(name)
        except ImportError:
            missing.append(name)
    if missing:
        print(f"❌ Still missing after install: {', '.join(missing)}")
        return False
    print(f"✓ {', '.join(REQUIRED_MODULES)} importable")
    return True


def prepare_directories():
    """Create the directories the configuration writes into"""
    print("\nPreparing directories from configuration...")
    from src.config import load_config

    settings = load_config()
    targets = {Path(settings.output_directory)}
    if settings.log_file:
        targets.add(Path(settings.log_file).parent)
    for target in sorted(targets):
        target.mkdir(parents=True, exist_ok=True)
        print(f"✓ {target}/")
    print(f"   search depth {settings.search_depth}, cmax {settings.cmax}, eps {settings.eps:g}")
    print("   Override per run with TURNOVER_CONFIG_PATH, TURNOVER_DEPTH, TURNOVER_THREADS")


def run_smoke_checks():
    print("\nRunning smoke checks...")
    ok = True
    for title, argv in SMOKE_COMMANDS:
        result = subprocess.run(
            [sys.executable, "main.py", "--log-level", "WARNING", *argv],
            capture_output=True,
            text=True,
            timeout=120,
        )
        if result.returncode == 0:
            print(f"✓ {title}")
        else:
            ok = False
            print(f"❌ {title} (exit {result.returncode})")
            print(result.stderr.strip())
    return ok


def print_next_steps():
    print_header("Setup Complete!")

    print("Next steps:")
    print("\n1. Search a tetrahedron for immersed turnovers:")
    print("   python main.py search '2,6,3;2,6,3' --depth 8")

    print("\n2. Check a marked polyhedron:")
    print("   python main.py poly tests/data/prism.json small")

    print("\n3. Run the acceptance suites:")
    print("   python main.py verify --suite items")
    print("   python main.py verify --suite invariants")

    print("\nDocumentation: docs/START_HERE.md, docs/TECH_STACK.md, docs/TESTING.md")
    print("\n" + "="*80 + "\n")


def main():
    print_header("Turnover Toolkit Setup")

    if not check_python_version():
        return 1
    if not install_dependencies():
        return 1

    prepare_directories()
    if not run_smoke_checks():
        print("\n⚠️  A smoke check failed; run the command above with --log-level DEBUG")

    print_next_steps()
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nSetup interrupted by user.")
        sys.exit(1)
