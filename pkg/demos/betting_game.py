"""
Playing the betting game
========================

Alice offers Bob odds of 3/2 on finding the ball. Bets count only when her
post-selection succeeds. An umpire watches how often she succeeds with and
without Bob looking; a cheat check has Bob open both boxes.
"""

from fractions import Fraction

from threebox import game, zoo

strategy = game.BobStrategy.random_box(0.5, p_none=0.2)
for name in ("quantum", "mr3", "cheating", "kirkpatrick"):
    nm = zoo.CONSTRUCTORS[name]()
    t = game.play_rounds(nm, strategy, 50_000, seed=1)
    ledger = game.settle_bets(t, odds=Fraction(3, 2))
    umpire = game.umpire_frequencies(t)
    rates = {",".join(c) or "N": round(f.rate, 4) for c, f in umpire.frequencies.items()}
    print(f"{name:12s} bets {ledger.bets_placed:5d}  alice wins {ledger.alice_win_rate:.3f}  "
          f"P(A) {rates}  umpire {'FLAGGED' if umpire.flagged else 'ok'}")

print()
for name in ("quantum", "mr3", "cheating"):
    c = game.cheat_check(zoo.CONSTRUCTORS[name](), 50_000, seed=2)
    print(f"{name:12s} two balls found: exact {c.exact}, observed {c.empirical:.4f}")
