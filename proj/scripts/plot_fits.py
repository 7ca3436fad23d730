#!/usr/bin/env python3
"""Plot a plotdata.csv export and report band coverage and curve ordering.

Usage: plot_fits.py PLOTDATA.csv OUT.png [--title TEXT] [--adult 20-90]
"""
import argparse
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def coverage(df):
    raw = df[df.series == "raw"].set_index(["population", "age"]).value
    band = df[df.series == "band"].set_index(["population", "age"])
    joined = band.join(raw.rename("raw"), how="inner").dropna(subset=["raw"])
    inside = (joined.raw >= joined.lower) & (joined.raw <= joined.upper)
    return inside.groupby(level="population").mean(), inside.mean()


def ordering(df, first, last, upper="M", lower="F"):
    fit = df[(df.series == "fitted") & df.age.between(first, last)]
    wide = fit.pivot(index="age", columns="population", values="value")
    if upper not in wide or lower not in wide:
        return None
    return int((wide[upper] > wide[lower]).sum()), len(wide)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("plotdata")
    ap.add_argument("out")
    ap.add_argument("--title", default="")
    ap.add_argument("--adult", default="20-90")
    args = ap.parse_args()

    df = pd.read_csv(args.plotdata)
    fig, ax = plt.subplots(figsize=(8, 5))
    colours = defaultdict(lambda: None)
    for pop, group in df.groupby("population"):
        raw = group[group.series == "raw"]
        pts = ax.scatter(raw.age, raw.value, s=6, alpha=0.6, label=f"{pop} observed")
        colours[pop] = pts.get_facecolor()[0]
        for series, style in (("band", 0.25), ("forecast", 0.12)):
            part = group[group.series == series]
            if not part.empty:
                ax.fill_between(part.age, part.lower, part.upper, color=colours[pop], alpha=style)
        for series, ls in (("fitted", "-"), ("forecast", "--")):
            part = group[group.series == series]
            if not part.empty:
                ax.plot(part.age, part.value, ls, color=colours[pop], lw=1.2)
    ax.set_xlabel("age")
    ax.set_ylabel("value")
    ax.set_title(args.title)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)

    per_pop, overall = coverage(df)
    for pop, share in per_pop.items():
        print(f"coverage {pop}: {share:.3f}")
    print(f"coverage all: {overall:.3f}")
    first, last = (int(v) for v in args.adult.split("-"))
    order = ordering(df, first, last)
    if order is not None:
        print(f"M above F at ages {first}-{last}: {order[0]}/{order[1]}")


if __name__ == "__main__":
    main()
