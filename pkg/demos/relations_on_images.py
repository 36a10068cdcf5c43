"""Build the evaluation images for gl(3|2) and check every defining relation.

Run: python3 demos/relations_on_images.py
"""

from collections import Counter

from superyangian.evalmap import SPECIALIZED, EvalParams, ev_h1, evaluation_assignment
from superyangian.foundation import RankData
from superyangian.tails import dump
from superyangian.yangian import evaluate_relation, minimal_relations

ctx = RankData(3, 2)
params = EvalParams(ctx, central=SPECIALIZED)

print("Image of h_{1,1} (first lines of the completion text format):")
print("\n".join(dump(ev_h1(1, params)).splitlines()[:6]))

asg = evaluation_assignment(params)
tally = Counter()
for rel in minimal_relations(ctx):
    v = evaluate_relation(rel, asg, "auto")
    tally[(rel.id, v.mode, v.holds)] += 1

print("\nrelation          mode       holds  count")
for (rid, mode, holds), k in sorted(tally.items()):
    print(f"{rid:<17} {mode:<10} {str(holds):<6} {k}")
