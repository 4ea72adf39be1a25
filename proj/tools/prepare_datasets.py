#!/usr/bin/env python3
"""Copy and convert the benchmark datasets into data/.

Source: the `imbalanced-databases` wheel (pip download imbalanced-databases),
unpacked anywhere. Usage:

    python3 tools/prepare_datasets.py <unpacked>/imbalanced_databases/data data/

KEEL files are copied verbatim. german and hypothyroid ship in raw UCI form
and are converted to CSV here.
"""
import csv
import shutil
import statistics
import sys
from pathlib import Path

KEEL = {
    "abalone9-18.dat": "abalone9-18/abalone9-18.dat",
    # <null> cells are replaced by -1.0 in the *_no_null variant
    "cleveland-0.dat": "cleveland-0_vs_4/cleveland-0_vs_4_no_null.dat",
    "ecoli3.dat": "ecoli3/ecoli3.dat",
    "glass2.dat": "glass2/glass2.dat",
    "haberman.dat": "haberman/haberman.dat",
}

HYPO_FLAGS = [
    "on_thyroxine", "query_on_thyroxine", "on_antithyroid_medication",
    "thyroid_surgery", "query_hypothyroid", "query_hyperthyroid", "pregnant",
    "sick", "tumor", "lithium", "goitre",
]
HYPO_MEASURES = ["TSH", "T3", "TT4", "T4U", "FTI"]


def convert_german(src: Path, dst: Path) -> None:
    rows = [line.split() for line in src.read_text().splitlines() if line.strip()]
    header = [f"a{i + 1}" for i in range(len(rows[0]) - 1)] + ["class"]
    with dst.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            # 1 = good credit, 2 = bad credit (the minority)
            w.writerow(r[:-1] + ["bad" if r[-1] == "2" else "good"])


def convert_hypothyroid(src: Path, dst: Path) -> None:
    raw = [line.strip().split(",") for line in src.read_text().splitlines() if line.strip()]
    # fields: class, age, sex, 11 t/f flags, then (measured, value) pairs for
    # TSH, T3, TT4, T4U, FTI, TBG. TBG is almost never measured and is dropped.
    recs = []
    for r in raw:
        rec = {"class": r[0], "age": r[1], "sex": r[2]}
        for i, name in enumerate(HYPO_FLAGS):
            rec[name] = "1" if r[3 + i] == "t" else "0"
        for i, name in enumerate(HYPO_MEASURES):
            rec[name] = r[14 + 2 * i + 1]
        recs.append(rec)

    def median_of(col):
        return statistics.median(float(x[col]) for x in recs if x[col] != "?")

    fill = {c: median_of(c) for c in ["age"] + HYPO_MEASURES}
    sexes = [x["sex"] for x in recs if x["sex"] != "?"]
    sex_mode = max(set(sexes), key=sexes.count)
    header = ["age", "sex"] + HYPO_FLAGS + HYPO_MEASURES + ["class"]
    with dst.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for x in recs:
            sex = x["sex"] if x["sex"] != "?" else sex_mode
            row = [x["age"] if x["age"] != "?" else repr(fill["age"]),
                   "1" if sex == "F" else "0"]
            row += [x[c] for c in HYPO_FLAGS]
            row += [x[c] if x[c] != "?" else repr(fill[c]) for c in HYPO_MEASURES]
            row.append(x["class"])
            w.writerow(row)


def main() -> None:
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    for out, rel in KEEL.items():
        shutil.copyfile(src / rel, dst / out)
    convert_german(src / "german/german.data-numeric.txt", dst / "german.csv")
    convert_hypothyroid(src / "hypothyroid/hypothyroid.data.txt", dst / "hypothyroid.csv")


if __name__ == "__main__":
    main()
