"""Exercise the three optimizers on classic test functions.

Each instance owns a deterministic xoshiro256+ stream, respects its
evaluation budget exactly, and reports how it stopped.
"""

import numpy as np

from fpsat import (
    OptimizerConfig,
    Xoshiro256Plus,
    basin_hopping,
    crs2_minimize,
    isres_minimize,
    powell_minimize,
)


def sphere(x):
    return float(np.sum(np.asarray(x) ** 2))


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


cfg = OptimizerConfig(max_evals=100_000, bounds=(-5.0, 5.0))

print("Powell (local) on a shifted parabola:")
out = powell_minimize(lambda x: (x[0] - 3.0) ** 2 + (x[1] + 1.0) ** 2,
                      [0.0, 0.0], cfg)
print(f"  best={out.best_value:.3e} at {out.best_x} "
      f"evals={out.evals_used} stop={out.terminated_by.value}")

print("basin hopping on 2-D Rosenbrock:")
out = basin_hopping(rosenbrock, np.array([-1.2, 1.0]), cfg, Xoshiro256Plus(7))
print(f"  best={out.best_value:.3e} at {out.best_x} "
      f"evals={out.evals_used} stop={out.terminated_by.value}")

print("CRS2 with local mutation on the 3-D sphere:")
out = crs2_minimize(sphere, np.array([1.0, 1.0, 1.0]), cfg, Xoshiro256Plus(13))
print(f"  best={out.best_value:.3e} evals={out.evals_used} "
      f"stop={out.terminated_by.value}")

print("ISRES on the 3-D sphere:")
out = isres_minimize(sphere, np.array([1.0, 1.0, 1.0]), cfg, Xoshiro256Plus(17))
print(f"  best={out.best_value:.3e} evals={out.evals_used} "
      f"stop={out.terminated_by.value}")

print("\nsame seed, same trajectory:")
a = basin_hopping(rosenbrock, np.array([0.0, 0.0]),
                  OptimizerConfig(max_evals=500), Xoshiro256Plus(99))
b = basin_hopping(rosenbrock, np.array([0.0, 0.0]),
                  OptimizerConfig(max_evals=500), Xoshiro256Plus(99))
print(f"  run A best={a.best_value:.6e}  run B best={b.best_value:.6e}  "
      f"identical={a.best_value == b.best_value and a.evals_used == b.evals_used}")
