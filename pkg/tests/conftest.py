import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from modalcat.core import Graph, MSubobject, make_gset

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, max_vertices=3, max_edges=4):
    n = draw(st.integers(1, max_vertices))
    vs = tuple(f"v{i}" for i in range(n))
    m = draw(st.integers(0, max_edges))
    edges = tuple((f"k{j}", draw(st.sampled_from(vs)), draw(st.sampled_from(vs))) for j in range(m))
    return Graph(vs, edges)


@st.composite
def gsets(draw, graph=None, max_carrier=3, min_carrier=0):
    G = graph if graph is not None else draw(graphs())
    carriers = {v: list(range(draw(st.integers(min_carrier, max_carrier)))) for v in G.vertices}
    rels = {}
    for e in G.edges:
        candidates = [(a, b) for a in carriers[e.src] for b in carriers[e.dst]]
        rels[e.name] = draw(st.lists(st.sampled_from(candidates), unique=True)) if candidates else []
    return make_gset(G, carriers, rels)


@st.composite
def subobjects(draw, X):
    return MSubobject(X, draw(st.integers(0, X.full_mask)))


@st.composite
def gset_with_subs(draw, k=2, **kw):
    X = draw(gsets(**kw))
    return (X, *[draw(subobjects(X)) for _ in range(k)])


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
