#!/usr/bin/env python3
"""Extract the Boston housing table bundled with scikit-learn 1.1.x into a plain CSV.

Usage: python3 tools/fetch_housing.py OUT.csv
Needs pip access to download the wheel; nothing is installed.
"""

import glob
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "sklearn/datasets/data/boston_house_prices.csv"


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
             "scikit-learn==1.1.3", "-d", tmp],
            check=True,
        )
        wheel = glob.glob(f"{tmp}/scikit_learn-*.whl")[0]
        lines = zipfile.ZipFile(wheel).read(MEMBER).decode().splitlines()
    # first line holds the table shape, second the quoted header
    with open(sys.argv[1], "w", newline="\n") as out:
        out.write("\n".join(lines[1:]) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
