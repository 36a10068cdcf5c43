"""Sum ev(h~_{i,1}) over all nodes and see which right side it equals.

The tail families telescope and the closed forms add up to
lin - hbar*c*E_NN, but the sum taken from the definition
h~ = h_{i,1} - (hbar/2) h_{i,0}^2 lands on lin + hbar*c*E_11 - hbar*c^2/2.
The residual printed below is the node-0 difference.

Run: python3 demos/htilde_sum.py
"""

from superyangian.evalmap import EvalParams, closed_form_defect
from superyangian.foundation import RankData
from superyangian.surjectivity import htilde_sum_identity
from superyangian.tails import dump

for m, n in [(3, 2), (2, 3)]:
    params = EvalParams(RankData(m, n))
    res = htilde_sum_identity(params)
    print(f"gl({m}|{n})")
    for c in res.checks:
        print(f"  {'ok' if c.holds else 'FAILS':<6}{c.name:<28}{c.anchor}")
    print("  residual of the definition route:")
    for line in dump(res.check("definition-route").residual).splitlines()[1:]:
        print("   ", line)
    print("  definition minus closed form at node 0:")
    for line in dump(closed_form_defect(params, 0)).splitlines()[1:]:
        print("   ", line)
