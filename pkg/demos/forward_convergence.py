"""Spectral convergence of the forward solver on a manufactured problem.

Ten elements on [-2, 1] x [0, 1], a seeded two-level design, and an exact
smooth state whose induced source makes it the true solution.  The
discrete error falls almost exponentially with the per-element degree
until round-off takes over around 1e-13.
"""

from stheat.verification import convergence_study

print(f"{'N':>4} {'state L2 error':>16} {'objective error':>16}")
for point in convergence_study(range(4, 21, 2)):
    print(f"{point.n:>4} {point.state_error:>16.3e} {point.objective_error:>16.3e}")
