"""
Fault-tolerant resource estimates
=================================

Rotation counts, error-budget split, surface-code distance, physical
qubits and runtime for depth-6 circuits on 3-regular graphs.
"""

import sys

from rwsqaoa.resource import circuit_fidelity, estimate_full, estimates_to_csv

print(f"near-term fidelity, 96 qubits, p=4: {circuit_fidelity(96, 144, 4):.3f}")

ests = [estimate_full(n, 3, 6) for n in (1000, 3000, 10_000, 30_000, 100_000)]
estimates_to_csv(ests, sys.stdout)
