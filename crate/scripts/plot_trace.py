"""Plot a trace CSV written by `ppc simulate`."""

import argparse

import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("trace")
    parser.add_argument("--out", help="save instead of showing")
    args = parser.parse_args()

    df = pd.read_csv(args.trace)
    fig, (top, mid, bottom) = plt.subplots(3, 1, sharex=True, figsize=(8, 8))

    top.plot(df.t, df.x_r, "k--", label="x_r")
    top.plot(df.t, df.x_1, label="x_1")
    top.legend()

    rho = df.rho.where(df.rho < 10)
    for col in [c for c in df.columns if c.startswith("z_")]:
        mid.plot(df.t, df[col], label=col)
    mid.plot(df.t, rho, "k", lw=0.8)
    mid.plot(df.t, -rho, "k", lw=0.8)
    mid.set_ylim(-1, 1)
    mid.legend()

    bottom.plot(df.t, df.u, label="u")
    bottom.set_xlabel("t")
    bottom.legend()

    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
