"""
The three-box game in a Hilbert space
=====================================

A ball is prepared in an equal superposition of three boxes. Bob may open
box 1 or box 2; Alice then post-selects. Whenever her post-selection
succeeds she knows where Bob found the ball, whichever box he opened.
"""

from threebox import classicality as cl
from threebox import quantum_core as qc
from threebox.stats import collect_stats

scenario = qc.build_three_box_scenario()
print("initial state:", scenario.initial.round(4))

# Joint statistics of Bob's look and Alice's post-selection
for seq in (["M1", "MA"], ["M2", "MA"], ["MA"]):
    dist = qc.sequence_distribution(scenario, seq).rationalized()
    print(",".join(seq).ljust(6), {",".join(k): str(v) for k, v in sorted(dist.items())})

# Neither intervening look changes how often Alice succeeds, yet the
# conditional probabilities of finding the ball add up to 2.
stats = collect_stats(scenario)
print("ndm gaps      ", {m: str(g) for m, g in cl.ndm_gap(stats).items()})
print("pps score     ", cl.pps_score(stats))
print("nim bound     ", cl.nim_bound_check(stats))

# The same numbers violate a Leggett-Garg inequality, -1 <= <Q> <= 3.
value = cl.lgi_value(stats)
print("<Q_obs>       ", value, "violated" if cl.lgi_violated(value) else "satisfied")
