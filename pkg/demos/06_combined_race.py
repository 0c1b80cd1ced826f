"""Race the portfolio against a (stubbed) external SMT solver.

The combined mode keeps the portfolio's speed on satisfiable inputs and
borrows completeness from the external tool: unsat can only ever come
from the external side.
"""

import stat
import sys
import tempfile
import textwrap
from pathlib import Path

from fpsat import PortfolioConfig
from fpsat.harness import corpus_dir, run_combined

with tempfile.TemporaryDirectory() as tmp:
    stub = Path(tmp) / "slow_solver.py"
    stub.write_text(textwrap.dedent("""\
        import sys, time
        time.sleep(15)
        print("sat")
    """))
    stub.chmod(stub.stat().st_mode | stat.S_IEXEC)
    cmd = f"{sys.executable} {stub}"

    out = run_combined(corpus_dir() / "listing1.smt2", cmd,
                       PortfolioConfig(max_evals=100_000, seed=4), timeout=30.0)
    print(f"satisfiable input : verdict={out.verdict} source={out.source} "
          f"wall={out.wall_time:.2f}s (slow external was terminated)")

    unsat_stub = Path(tmp) / "unsat_solver.py"
    unsat_stub.write_text('print("unsat")\n')
    cmd = f"{sys.executable} {unsat_stub}"
    out = run_combined(corpus_dir() / "infeasible_cycle.smt2", cmd,
                       PortfolioConfig(max_evals=10**9, seed=4), timeout=30.0)
    print(f"infeasible input  : verdict={out.verdict} source={out.source} "
          f"wall={out.wall_time:.2f}s (portfolio was cancelled)")
