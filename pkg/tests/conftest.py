import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cubicmoment.cli import load_instance
from cubicmoment.oracle import forward_moments

DATA = os.path.join(os.path.dirname(__file__), "data")

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def data_path(name):
    return os.path.join(DATA, name)


def example(name):
    """(sequence, curve) of a stored instance file, e.g. example('type2_example')."""
    return load_instance(data_path(name + ".json"))


def delta(x, y, k=3, w=1):
    return forward_moments([(Fraction(x), Fraction(y), Fraction(w))], k)


def rand_frac(rng: random.Random, height=9, nonzero=False):
    while True:
        q = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if q != 0 or not nonzero:
            return q


def rand_matrix(rng: random.Random, n, m, rank=None, height=5):
    """n x m rational matrix of the given rank (a product of two random factors)."""
    r = min(n, m) if rank is None else rank
    left = [[rand_frac(rng, height) for _ in range(r)] for _ in range(n)]
    right = [[rand_frac(rng, height) for _ in range(m)] for _ in range(r)]
    return [[sum((left[i][t] * right[t][j] for t in range(r)), Fraction(0)) for j in range(m)]
            for i in range(n)]


def rand_gram(rng: random.Random, n, rank=None, height=5):
    """A random psd n x n matrix G^T G, rank at most the given rank."""
    r = n if rank is None else rank
    g = [[rand_frac(rng, height) for _ in range(n)] for _ in range(r)]
    return [[sum((g[t][i] * g[t][j] for t in range(r)), Fraction(0)) for j in range(n)]
            for i in range(n)]


fractions_st = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@pytest.fixture
def rng():
    return random.Random(20240611)


# ---------------------------------------------------------------- acceptance summary

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.name.startswith("test_criterion_") and (rep.when == "call" or rep.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        number = int(item.name.split("_")[2])
        if rep.failed or number not in _criteria:
            _criteria[number] = ("PASS" if rep.passed else "FAIL", doc)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, doc = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {doc}")
