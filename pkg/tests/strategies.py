"""Hypothesis strategies for random complexes and systems."""

import random

from hypothesis import strategies as st

from rfkit.exact_linalg import QQ, Field
from rfkit.graded_complex import random_complex
from rfkit.limit_systems import random_system

fields = st.sampled_from([QQ, Field(2), Field(5)])
rngs = st.integers(0, 10 ** 6).map(random.Random)


@st.composite
def complexes(draw, degrees=(-1, 0, 1, 2)):
    rng = draw(rngs)
    field = draw(fields)
    dims = {k: draw(st.integers(0, 3)) for k in degrees}
    return random_complex(rng, field, dims)


@st.composite
def system_pairs(draw, max_window=4):
    rng = draw(rngs)
    field = draw(fields)
    W = draw(st.integers(1, max_window))
    return field, W, random_system(rng, field, -W, 0), random_system(rng, field, 1, W), rng
