import hypothesis.strategies as st
from hypothesis import settings

from padicpme.padic import PAdicExpansion

settings.register_profile("ci", deadline=None)
settings.load_profile("ci")

PRIMES = st.sampled_from([2, 3, 5])


def expansion_strategy(p: int, min_exp: int = -4, max_exp: int = 4):
    """Finite expansions sum d_j p^j with digits in [1, p)."""
    def build(pairs):
        return PAdicExpansion(p, tuple(pairs.items()))
    return st.dictionaries(st.integers(min_exp, max_exp),
                           st.integers(1, p - 1), max_size=6).map(build)


@st.composite
def prime_and_expansions(draw, count: int = 2):
    p = draw(PRIMES)
    xs = tuple(draw(expansion_strategy(p)) for _ in range(count))
    return (p, *xs)
