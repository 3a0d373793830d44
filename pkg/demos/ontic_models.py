"""
Reproducing the statistics with hidden variables
================================================

Two finite ontic models reproduce the single-look statistics of the
three-box game. One hides a second ball; the other keeps a single ball but
lets Bob's look disturb which ontic state it occupies.
"""

from threebox import classicality as cl
from threebox import zoo
from threebox.stats import stats_equal

quantum = zoo.quantum_three_box().stats()

cheat = zoo.cheating_model()
print(cheat.description)
print("same single-look stats as quantum:", stats_equal(cheat.stats(), quantum))
occ = cl.double_occupancy(cheat.model, cheat.preparation())
print("ball found in both boxes:", occ.value)
print("macrorealist decomposition:", cl.macrorealist_decomposition(cheat.model, cheat.preparation()))

# A single ball that is always in exactly one box
for build in (zoo.mr3_model, zoo.mr2_model):
    nm = build()
    mu = nm.preparation()
    eigen = [nm.preparation(p) for p in nm.eigen_preparations]
    dec = cl.macrorealist_decomposition(nm.model, mu)
    print()
    print(nm.description)
    print("box weights:", [str(w) for w in dec.weights])
    print("class:", cl.classify_mr(nm.model, mu, eigen))
    nim = cl.nim1_nim2_check(nm.model, mu, dec)
    print("nim1:", nim.nim1, nim.nim1_witness, "nim2:", nim.nim2, nim.nim2_witness)
