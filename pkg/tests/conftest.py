from fractions import Fraction

from hypothesis import strategies as st

from hse.groupring import FiniteAbelianGroup, GroupRingElement

GROUPS = [(), (2,), (3,), (4,), (2, 2)]


def group_st():
    return st.sampled_from(GROUPS).map(FiniteAbelianGroup)


def element_st(G, bound=5, den=1):
    q = st.builds(Fraction, st.integers(-bound, bound), st.integers(1, den))
    return st.lists(q, min_size=G.order, max_size=G.order).map(lambda c: GroupRingElement(G, c))


@st.composite
def group_and_elements(draw, count=1, bound=5, den=1):
    G = draw(group_st())
    return (G,) + tuple(draw(element_st(G, bound, den)) for _ in range(count))


def E(G, *pairs):
    """E(G, ((0,), 1), ((1,), -1)) builds 1 - g."""
    return GroupRingElement.from_terms(G, [(g, Fraction(c)) for g, c in pairs]).simplified()
