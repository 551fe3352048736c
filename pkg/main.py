"""
LDOI toolkit: invariant bipartite matrices, covariant maps and separability certificates

Subcommands read JSON from a file or stdin and write JSON to stdout:
- build / extract / project: move between triples and dense matrices
- check / spectrum / rank / permute: tests and block-wise linear algebra
- compose / apply / kraus: covariant-map algebra
- certify / detect / validate-catalog: separability witnesses and verdicts
- gallery: named families (Werner, isotropic, Choi-type maps, Stormer, ...)

Usage: python main.py <subcommand> [options]
"""
import sys

from src.cli import run


def main() -> int:
    """Main entry point"""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
