"""Plots nuem CSV outputs. Usage: python3 plot_outputs.py OUT_DIR [--save FILE]"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--save", type=Path, help="write the figure instead of showing it")
    args = parser.parse_args()

    panels = []
    if (args.out_dir / "weights.csv").exists():
        panels.append("weights")
    if (args.out_dir / "mc_moments.csv").exists():
        panels.append("mc_moments")
    if (args.out_dir / "moments.csv").exists():
        panels.append("moments")
    if (args.out_dir / "contributions.csv").exists():
        panels.append("contributions")
    if not panels:
        raise SystemExit(f"no known CSV in {args.out_dir}")

    fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
    for ax, name in zip(axes[0], panels):
        df = pd.read_csv(args.out_dir / f"{name}.csv")
        if name == "weights":
            ax.scatter(df["lambda"], df["weight_sum"] * df["lambda"] / 2, s=4)
            ax.set_xscale("log")
            ax.set_xlabel("lambda_j")
            ax.set_ylabel("weight_sum / (2 / lambda_j)")
        elif name == "contributions":
            ax.step(df["tau"], df["lhs_estimate"], where="post", label="estimate")
            if df["lhs_exact"].notna().any():
                ax.step(df["tau"], df["lhs_exact"], where="post", label="exact")
            ax.set_xlabel("tau")
            ax.set_ylabel("lhs contribution")
            ax.legend()
        else:
            value = "estimate" if name == "mc_moments" else "full"
            for j, group in df.groupby("j"):
                line, = ax.plot(group["tau"], group[value], label=f"j={j}")
                if name == "mc_moments" and group["exact"].notna().any():
                    ax.plot(group["tau"], group["exact"], "--", color=line.get_color())
            ax.set_xlabel("tau")
            ax.set_ylabel("E|X_j|^2")
            ax.legend(fontsize="small")
        ax.set_title(name)
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save)
    else:
        plt.show()


if __name__ == "__main__":
    main()
