import pytest
from hypothesis import given, strategies as st

from peasim.core import (
    Genotype,
    Individual,
    Population,
    bit_matrix,
    hamming_normalized,
    population_converged,
)
from peasim.rng import RandomSource


def g(text: str) -> Genotype:
    return Genotype.from01(text)


def ind(text: str, fitness: float = 0.0) -> Individual:
    return Individual(g(text), fitness, 1.0)


class TestGenotype:
    def test_round_trip(self):
        assert g("0110").to01() == "0110"
        assert g("0110").bits == 0b0110  # position 1 and 2 set

    def test_bit_positions(self):
        x = g("100")
        assert (x.bit(0), x.bit(1), x.bit(2)) == (1, 0, 0)

    def test_complement(self):
        assert g("0101").complement().to01() == "1010"

    def test_rejects_out_of_range_bits(self):
        with pytest.raises(ValueError):
            Genotype(0b100, 2)
        with pytest.raises(ValueError):
            Genotype(-1, 2)

    def test_with_mask_from(self):
        child = g("0000").with_mask_from(g("1111"), 0b0110)
        assert child.to01() == "0110"

    def test_random_is_seed_deterministic(self):
        a = Genotype.random(50, RandomSource(7))
        b = Genotype.random(50, RandomSource(7))
        assert a == b


class TestHamming:
    def test_identity(self):
        assert hamming_normalized(g("0000"), g("0000")) == 0.0

    def test_complement(self):
        assert hamming_normalized(g("0000"), g("1111")) == 1.0

    def test_quarter(self):
        # 0011 vs 0001 differ in exactly one of four positions
        assert hamming_normalized(g("0011"), g("0001")) == 0.25

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hamming_normalized(g("00"), g("000"))

    @given(st.integers(1, 60), st.integers(0, 2**60 - 1), st.integers(0, 2**60 - 1))
    def test_symmetric_and_bounded(self, length, x, y):
        mask = (1 << length) - 1
        a, b = Genotype(x & mask, length), Genotype(y & mask, length)
        h = hamming_normalized(a, b)
        assert h == hamming_normalized(b, a)
        assert 0.0 <= h <= 1.0
        assert (h == 0.0) == (a == b)
        assert (h == 1.0) == (a == b.complement())


class TestPopulation:
    def test_converged(self):
        pop = Population([ind("0101"), ind("0101"), ind("0101")])
        assert population_converged(pop)

    def test_not_converged(self):
        pop = Population([ind("0101"), ind("0100"), ind("0101")])
        assert not population_converged(pop)

    def test_empty_population_is_an_error(self):
        with pytest.raises(ValueError):
            population_converged(Population())

    def test_replace_updates_convergence(self):
        pop = Population([ind("01"), ind("10")])
        assert not pop.converged()
        pop.replace(1, ind("01"))
        assert pop.converged()

    def test_mean_and_best(self):
        pop = Population([ind("01", 1.0), ind("10", 3.0)])
        assert pop.mean_fitness() == 2.0
        assert pop.best() == (1, pop[1])


class TestRandomSource:
    def test_identical_seed_identical_draws(self):
        a = RandomSource(123)
        b = RandomSource(123)
        assert [a.integer(1000) for _ in range(10_000)] == [
            b.integer(1000) for _ in range(10_000)
        ]

    def test_split_streams_differ_and_reproduce(self):
        root = RandomSource(5)
        s1 = root.split(1)
        s2 = root.split(2)
        seq1 = [s1.integer(10**9) for _ in range(100)]
        seq2 = [s2.integer(10**9) for _ in range(100)]
        assert seq1 != seq2
        again = RandomSource(5).split(1)
        assert [again.integer(10**9) for _ in range(100)] == seq1

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RandomSource(-1)


def test_bit_matrix_layout():
    pop = [ind("110"), ind("001")]
    m = bit_matrix(pop, 3)
    assert m.tolist() == [[1, 1, 0], [0, 0, 1]]
