from itertools import product

from hypothesis import strategies as st

from digifix import DigitalImage, SelfMap


@st.composite
def images(draw, max_dim=3, max_side=3, min_size=1, max_size=4):
    dim = draw(st.integers(1, max_dim))
    side = draw(st.integers(2, max_side))
    box = list(product(range(side), repeat=dim))
    hi = min(max_size, len(box))
    size = draw(st.integers(min(min_size, hi), hi))
    pts = draw(st.lists(st.sampled_from(box), min_size=size, max_size=size, unique=True))
    u = draw(st.integers(1, dim))
    return DigitalImage(tuple(pts), u)


@st.composite
def self_maps(draw, img):
    n = len(img)
    return SelfMap(img, tuple(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))))


@st.composite
def image_with_maps(draw, count=2, **kw):
    img = draw(images(**kw))
    return (img, *[draw(self_maps(img)) for _ in range(count)])


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion" in nodeid and rep.when == "call":
                name = nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines, key=lambda x: (int(x[0].split("_")[2]), x[0])):
            terminalreporter.write_line(f"{verdict}  {name}")
