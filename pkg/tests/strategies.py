"""Hypothesis strategies for small random categories and copresheaves"""

import random

from hypothesis import strategies as st

from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import random_chain_in, random_copresheaf, random_poset

seeds = st.integers(min_value=0, max_value=2**16)


def posets(max_size: int = 4):
    return st.builds(lambda seed, size: random_poset(random.Random(seed), size),
                     seeds, st.integers(min_value=1, max_value=max_size))


def copresheaves(max_size: int = 3):
    def build(seed, size):
        rng = random.Random(seed)
        return random_copresheaf(rng, random_poset(rng, size))
    return st.builds(build, seeds, st.integers(min_value=1, max_value=max_size))


def chains(max_length: int = 3):
    return st.integers(min_value=0, max_value=max_length).map(chain)


def chains_in(max_size: int = 4, max_length: int = 2):
    """Pairs (poset, functor [k] → poset)"""
    def build(seed, size, length):
        rng = random.Random(seed)
        c = random_poset(rng, size)
        return c, random_chain_in(rng, c, length)
    return st.builds(build, seeds, st.integers(min_value=1, max_value=max_size),
                     st.integers(min_value=0, max_value=max_length))
