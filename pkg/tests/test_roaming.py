import math

import numpy as np
import pytest

from cechain import bits
from cechain.sigchain import ChainError, guess_success_probability, monte_carlo_guess, roaming_slices, roaming_verify


@pytest.fixture
def local(keys, message):
    return roaming_slices(keys.pmk, message)


def test_two_correct_slices(local):
    assert roaming_verify([(2, local[2].bits), (9, local[9].bits)], local)


def test_one_corrupted(local):
    assert not roaming_verify([(2, local[2].bits), (9, bits.flip(local[9].bits, 0))], local)


def test_duplicate_indices_rejected(local):
    with pytest.raises(ChainError):
        roaming_verify([(4, local[4].bits), (4, local[4].bits)], local)


def test_index_range(local):
    with pytest.raises(ChainError):
        roaming_verify([(0, local[1].bits), (4, local[4].bits)], local)


def test_random_pair_success_rate(local):
    # Analytic 2^-26 is unobservable at 1e6 trials; the rate observable here is
    # bounded by a Poisson 3-sigma band around 1e6 * 2^-26 ~ 0.015.
    rng = np.random.default_rng(11)
    trials = 1_000_000
    a = rng.integers(0, 2**13, size=trials)
    b = rng.integers(0, 2**13, size=trials)
    hits = int(((a == bits.to_int(local[3].bits)) & (b == bits.to_int(local[7].bits))).sum())
    expected = trials * 2.0 ** -26
    assert hits <= expected + 3 * math.sqrt(expected) + 1
    # per-slice rate is large enough to check against 2^-13 directly
    single = int((a == bits.to_int(local[3].bits)).sum())
    mu = trials * 2.0 ** -13
    assert abs(single - mu) <= 3 * math.sqrt(mu)


def test_guess_reference_value():
    assert guess_success_probability(12, 20, 3) == pytest.approx(3.43e-5, rel=2e-3)


def test_guess_trivial():
    assert guess_success_probability(1, 1, 1) == pytest.approx(0.5)


def test_guess_thirteen_bit():
    assert guess_success_probability(12, 13, 3) == pytest.approx(4.39e-3, rel=2e-3)


def test_guess_rejects_bad_args():
    with pytest.raises(ValueError):
        guess_success_probability(12, 0, 3)


@pytest.mark.parametrize("width, trials", [(13, 10_000_000), (8, 200_000)])
def test_monte_carlo_matches_closed_form(width, trials):
    hits, n = monte_carlo_guess(12, width, 3, trials, seed=width)
    p = guess_success_probability(12, width, 3)
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) <= 3 * sigma
