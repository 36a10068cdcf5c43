"""Express diagonal loop elements E_jj(a) through images of the generators.

Run: python3 demos/density_witnesses.py
"""

from superyangian.evalmap import SPECIALIZED, DegenerateCentralCharge, EvalParams
from superyangian.foundation import RankData
from superyangian.surjectivity import density_report, diag_witness

ctx = RankData(3, 2)
params = EvalParams(ctx, central=SPECIALIZED)

w = diag_witness(2, 1, params)
print("E_{2,2}(1) =")
for k, label, _ in w.expression:
    print(f"    ({k}) * {label}")
print("  minus an sl-completion remainder; verified:", w.verified)

rep = density_report(params, 2)
print(f"\nwindow 2: {sum(e.verified for e in rep.entries)}/{len(rep.entries)} targets verified")

try:
    density_report(EvalParams(ctx, central=SPECIALIZED, bindings=(("eps1", 0),)), 2)
except DegenerateCentralCharge as exc:
    print("with eps1 = 0:", exc)
