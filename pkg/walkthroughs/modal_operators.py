"""Diamond and box on a two-element G-set, and where S4 breaks.

Run with ``python3 walkthroughs/modal_operators.py``.
"""

from modalcat import core, laws
from modalcat.fixtures import W, X1

# X1 has one loop edge k relating 0 to 1.
S = core.subobject(X1, {"a": [1]})
print("S         =", S)
print("dia S     =", core.dia(S))           # 0 sees 1
print("dia dia S =", core.dia(core.dia(S)))  # nothing sees 0
print("box S     =", core.box(S))

# The K laws hold on every object; closure laws need not.
for r in laws.k_laws_report(X1) + laws.closure_report(X1, subject="X1"):
    print(r.line())

# Products carry componentwise relations, so diamonds on W x W do not split.
print(laws.variable_independence_report(W, W, subject="WxW").line())

# Every fixture morphism is continuous, also after pairing with a battery object.
battery = laws.z_battery(X1.graph)
for f in core.all_morphisms(X1, X1):
    print(laws.continuity_report(f).line(), "|", laws.subspace_report(core.identity(X1), battery).line())
