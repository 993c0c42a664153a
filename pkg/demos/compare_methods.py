"""Run several counts on one election and show where they part ways.

    python3 demos/compare_methods.py [election-file]
"""

import sys
from pathlib import Path

from phragthiele.cli import load_election
from phragthiele.methods import parse_method
from phragthiele.report import render_comparison

TOKENS = ["phragmen", "thiele-add", "thiele-opt", "enestrom", "opt-load:a2,b1,c2"]


def main() -> None:
    source = sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).with_name("council.txt"))
    e = load_election(source)
    outcomes = [parse_method(t).run(e) for t in TOKENS]
    print(render_comparison(TOKENS, outcomes), end="")


if __name__ == "__main__":
    main()
