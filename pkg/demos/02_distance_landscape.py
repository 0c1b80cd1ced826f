"""Visualize the objective landscape of the quadratic instance.

The encoding maps every assignment to a non-negative distance; the zeros
are exactly the satisfying assignments. Writes landscape.png when
matplotlib is importable, and always prints an ASCII profile.
"""

import numpy as np

from fpsat import build_problem
from fpsat.harness import corpus_dir

problem = build_problem((corpus_dir() / "listing1.smt2").read_text())
xs = np.linspace(-6.0, 2.0, 161)
gs = np.array([problem.program.evaluate([x]) for x in xs])

print("log10(1+G) profile over x in [-6, 2]:")
scaled = np.log10(1.0 + gs)
top = scaled.max()
for row in range(10, -1, -1):
    level = top * row / 10.0
    line = "".join("#" if s >= level and s > 0 else " " for s in scaled)
    print(f"{level:6.2f} |{line}")
print("       +" + "-" * len(xs))
zeros = xs[gs == 0.0]
print(f"zeros on the coarse grid: {len(zeros)} of {len(xs)} points")

# zoom in: binary32 rounding turns the single real root into a band
fine = np.linspace(-2.001, -1.999, 4001)
fine_g = np.array([problem.program.evaluate([x]) for x in fine])
band = fine[fine_g == 0.0]
print(f"satisfying band around -2: [{band.min():+.6f}, {band.max():+.6f}] "
      f"width={band.max() - band.min():.2e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(xs, 1.0 + gs)
    ax.set_xlabel("x")
    ax.set_ylabel("1 + G(x)")
    ax.set_title("distance objective of the quadratic instance")
    fig.tight_layout()
    fig.savefig("landscape.png", dpi=120)
    print("wrote landscape.png")
except ImportError:
    print("matplotlib not available; skipped the PNG")
