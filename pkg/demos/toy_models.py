"""
Classical toy games that only look paradoxical
==============================================

Two card games and a shaken-box ball game produce conditional certainties
like the three-box game, but in each of them Bob's look changes how often
Alice succeeds, so the umpire could tell that Bob looked.
"""

from threebox import classicality as cl
from threebox import zoo

for build in (zoo.kirkpatrick_model, zoo.ravon_vaidman_model, zoo.leifer_spekkens_model):
    nm = build()
    report = cl.classicality_report(
        nm.model,
        nm.default_preparation,
        box_measurements=nm.box_measurements,
        final=nm.final,
        eigen_preps=nm.eigen_preparations,
        model_name=nm.name,
    )
    print(report.render())
    print()
