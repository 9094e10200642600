"""
A small comparison suite
========================

The harness runs a roster of solvers over an instance family and
summarises cut fractions, paired margins and time-to-target.  The same
run is available as ``rwsqaoa suite --config file.toml``.
"""

from rwsqaoa.bench import parse_config, run_suite
from rwsqaoa.bench.suite import crossover_report, format_table, paired_margins, summary_table

cfg = parse_config({
    "instances": {"n": 60, "degree": 3, "count": 8, "seed": 0},
    "solvers": {"bm": {"rounds": 1}, "sb": {"agents": 10, "steps": 2000},
                "rws-qaoa": {"p": [0, 1, 2]}},
})
records = run_suite(cfg)
print(format_table(summary_table(records)))
print()
print(format_table(paired_margins(records, "bm")))

###############################################################################
# How long do the classical solvers need to match the depth-2 average?

p2 = [r.cut_fraction for r in records if r.label == "rws-qaoa[p=2]"]
print()
print(format_table(crossover_report(records, sum(p2) / len(p2))))
