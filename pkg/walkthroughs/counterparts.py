"""Two classical worlds, their counterpart families, and the recovered diamond."""

from modalcat import DATA
from modalcat import harness as H
from modalcat.serialize import load_harness

h = DATA / "harness"
(m, n), (r, s), probes, quotients = load_harness([h / "m.json", h / "n.json"],
                                                 [h / "r.json", h / "s.json"], h / "probes.json")

print("stored r:", dict(r.relations))
best = H.maximal_counterpart(m, n, probes, quotients, "r")
print("greatest family m -> n:", dict(best.relations))
print("maximal:", H.is_maximal(best, probes, quotients)[0])

rep = H.representation_report([m, n], [r, s], probes, quotients)
print("counterpart diamond within stored diamond:", rep.ok)
for c in rep.gaps:
    print(f"  at {c.model}, probe {c.probe}: stored but unrealized {sorted(c.gaps)}")
