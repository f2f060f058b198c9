"""Small named instances used throughout the tests, walkthroughs and CLI data.

F1: one vertex ``a`` with a loop ``k``; X1 has the single pair (0, 1),
X1F the full relation and X1E the empty one.
F2: two vertices ``a -k-> b``.
F3: one vertex with two loops ``k1``, ``k2``.
"""

from __future__ import annotations

from .core import Graph, make_gset, make_morphism

G1 = Graph(("a",), (("k", "a", "a"),))
G2 = Graph(("a", "b"), (("k", "a", "b"),))
G3 = Graph(("a",), (("k1", "a", "a"), ("k2", "a", "a")))

X1 = make_gset(G1, {"a": [0, 1]}, {"k": [(0, 1)]})
X1F = make_gset(G1, {"a": [0, 1]}, {"k": [(a, b) for a in (0, 1) for b in (0, 1)]})
X1E = make_gset(G1, {"a": [0, 1]}, {"k": []})

Y = make_gset(G2, {"a": ["p", "q"], "b": ["r", "s"]}, {"k": [("p", "r"), ("p", "s")]})

W = make_gset(G3, {"a": [0, 1, 2]}, {"k1": [(0, 1)], "k2": [(0, 2)]})

F1_OBJECTS = (X1, X1F, X1E)
F2_OBJECTS = (Y,)
F3_OBJECTS = (W,)
FIXTURE_GROUPS = (F1_OBJECTS, F2_OBJECTS, F3_OBJECTS)
FIXTURE_OBJECTS = F1_OBJECTS + F2_OBJECTS + F3_OBJECTS

# identity-carrier maps
e_X1_X1F = make_morphism(X1, X1F, {"a": {0: 0, 1: 1}})
v_X1E_X1 = make_morphism(X1E, X1, {"a": {0: 0, 1: 1}})
const0_X1F = make_morphism(X1F, X1F, {"a": {0: 0, 1: 0}})
