#!/usr/bin/env python3
"""Convert the LINQS Cora dump into the plain files the toolkit reads.

The raw files (cora.cites, cora.content) ship inside the `pgl` wheel on PyPI.
Pass --wheel to use an already downloaded wheel, otherwise pip fetches it.

Outputs (0-based node ids, node order = order of cora.content):
  edges.tsv     "u<TAB>v", u < v, one line per undirected edge
  features.csv  2708 rows x 1433 binary columns, no header
  labels.csv    one integer class id per line
  classes.txt   class names, line i = class id i (sorted alphabetically)
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

WHEEL_SPEC = "pgl==2.2.6"
MEMBERS = ("pgl/data/cora/cora.cites", "pgl/data/cora/cora.content")


def fetch_wheel(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
         "--only-binary=:all:", "--platform", "manylinux1_x86_64",
         "--python-version", "3.10", "-d", str(workdir), WHEEL_SPEC],
        check=True)
    wheels = sorted(workdir.glob("pgl-*.whl"))
    if not wheels:
        sys.exit("pip did not produce a pgl wheel")
    return wheels[0]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--wheel", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data/cora"))
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel or fetch_wheel(pathlib.Path(tmp))
        with zipfile.ZipFile(wheel) as z:
            cites, content = (z.read(m).decode() for m in MEMBERS)

    rows = [line.split("\t") for line in content.splitlines() if line.strip()]
    index = {r[0]: i for i, r in enumerate(rows)}
    classes = sorted({r[-1] for r in rows})

    edges = set()
    for line in cites.splitlines():
        if not line.strip():
            continue
        a, b = line.split()
        u, v = index[a], index[b]
        if u != v:
            edges.add((min(u, v), max(u, v)))

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "edges.tsv").write_text("".join(f"{u}\t{v}\n" for u, v in sorted(edges)))
    (args.out / "features.csv").write_text("".join(",".join(r[1:-1]) + "\n" for r in rows))
    (args.out / "labels.csv").write_text("".join(f"{classes.index(r[-1])}\n" for r in rows))
    (args.out / "classes.txt").write_text("".join(c + "\n" for c in classes))
    print(f"{len(rows)} nodes, {len(edges)} edges, {len(rows[0]) - 2} features, "
          f"{len(classes)} classes -> {args.out}")


if __name__ == "__main__":
    main()
