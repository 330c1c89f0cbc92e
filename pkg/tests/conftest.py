"""Shared generators and hypothesis strategies for small structures."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from linspect.oracle import gen_pointed, gen_structure, suite_signature
from linspect.structures import Signature


def seeded_pair(seed: int, size: int = 4, n_props: int = 1, n_actions: int = 2):
    sig = suite_signature(n_props=n_props, n_actions=n_actions)
    rng = random.Random(seed)
    return gen_pointed(sig, size, rng), gen_pointed(sig, size, rng)


def seeded_pointed(seed: int, size: int = 4, n_props: int = 1, n_actions: int = 2):
    sig = suite_signature(n_props=n_props, n_actions=n_actions)
    return gen_pointed(sig, size, random.Random(seed))


@st.composite
def pointed_structures(draw, max_size: int = 4, n_props: int = 1, n_actions: int = 2):
    seed = draw(st.integers(min_value=0, max_value=10**6))
    size = draw(st.integers(min_value=1, max_value=max_size))
    sig = suite_signature(n_props=n_props, n_actions=n_actions)
    return gen_pointed(sig, size, random.Random(seed))


@st.composite
def pointed_pairs(draw, max_size: int = 4, n_props: int = 1, n_actions: int = 2):
    seed = draw(st.integers(min_value=0, max_value=10**6))
    size = draw(st.integers(min_value=1, max_value=max_size))
    return seeded_pair(seed, size=size, n_props=n_props, n_actions=n_actions)


@st.composite
def plain_structures(draw, max_size: int = 3):
    seed = draw(st.integers(min_value=0, max_value=10**6))
    sig = Signature((("P", 1), ("R", 2)))
    return gen_structure(sig, max_size, random.Random(seed))


@pytest.fixture
def rng():
    return random.Random(20260809)
