"""Race the portfolio over the bundled corpus and inspect the outcomes.

A sat verdict always carries a model that passed ground-truth
verification; instances that cannot be satisfied come back unknown after
the budgets run out (never 'unsat' - this is a semi-decision procedure).
"""

from fpsat import PortfolioConfig, load_problem, solve, verify_model
from fpsat.harness import corpus_dir

config = PortfolioConfig(
    instances=[("bh", 1), ("crs2", 1), ("isres", 1)],
    max_evals=50_000,
    seed=2024,
)

for path in sorted(corpus_dir().glob("*.smt2")):
    problem = load_problem(path)
    out = solve(problem.formula, problem.program, config)
    if out.verdict == "sat":
        assert verify_model(problem.formula, out.model)
        binding = ", ".join(
            f"{name}={value.to_float():g}" for name, _, value in out.model.entries
        )
        print(f"{path.name:<28} sat      by {out.winner[0]:<5} "
              f"evals={out.total_evals:<7} {binding}")
    else:
        print(f"{path.name:<28} unknown  ({out.unknown_reason}) "
              f"evals={out.total_evals}")

print("\nper-instance stats for the quadratic instance:")
problem = load_problem(corpus_dir() / "listing1.smt2")
out = solve(problem.formula, problem.program, config)
for s in out.stats:
    print(f"  {s.algorithm:<6} evals={s.evals:<6} best={s.best_value:<12g} "
          f"stop={s.terminated_by}")
print("\nmodel block as printed by the CLI:")
print(out.model.smt2_block())
