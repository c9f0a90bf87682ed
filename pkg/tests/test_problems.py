import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from peasim.core import Genotype
from peasim.problems import (
    AdjacentNk,
    DeceptiveTrap,
    TimeModel,
    ankl_optimum,
    ankl_partition,
    ankl_problem,
    dt_block_value,
    dt_partition,
    dt_problem,
    generate_ankl,
    instance_from_json,
    instance_to_json,
    make_time_model,
)
from peasim.rng import RandomSource


class TestDtBlock:
    def test_all_ones_scores_k(self):
        assert dt_block_value(5, 5) == 5

    def test_all_zeros_scores_k_minus_one(self):
        assert dt_block_value(0, 5) == 4

    def test_near_optimum_scores_zero(self):
        assert dt_block_value(4, 5) == 0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            dt_block_value(6, 5)
        with pytest.raises(ValueError):
            dt_block_value(-1, 5)

    def test_deception_flips_toward_zero_improve_except_from_optimum(self):
        # within one block, u -> u-1 improves unless leaving u = k
        for u in range(1, 5):
            assert dt_block_value(u - 1, 5) > dt_block_value(u, 5)
        assert dt_block_value(4, 5) < dt_block_value(5, 5)


class TestDeceptiveTrap:
    def test_paper_values_l50(self):
        fn = DeceptiveTrap(10, 5)
        assert fn.fitness(Genotype((1 << 50) - 1, 50)) == 50.0
        assert fn.fitness(Genotype(0, 50)) == 40.0

    def test_blockwise_sum(self):
        fn = DeceptiveTrap(2, 5)
        # block 0 all ones (5), block 1 has u=2 (k-u-1=2)
        bits = 0b11111 | (0b00011 << 5)
        assert fn.fitness(Genotype(bits, 10)) == 7.0

    def test_exhaustive_against_direct_reimplementation(self):
        fn = DeceptiveTrap(2, 3)
        for bits in range(1 << 6):
            expected = 0
            for block in range(2):
                u = bin((bits >> (3 * block)) & 0b111).count("1")
                expected += 3 if u == 3 else 3 - u - 1
            assert fn.fitness(Genotype(bits, 6)) == expected


class TestTimeModel:
    def test_endpoints_exact(self):
        opt = Genotype.from01("1111")
        tm = make_time_model((100, 1), opt)
        assert tm.eval_time(opt) == 1.0
        assert tm.eval_time(opt.complement()) == 100.0

    def test_halfway(self):
        opt = Genotype.from01("1111")
        tm = make_time_model((100, 1), opt)
        assert tm.eval_time(Genotype.from01("1100")) == 50.5

    def test_constant_ratio(self):
        opt = Genotype.from01("1010")
        tm = make_time_model((1, 1), opt)
        for bits in range(16):
            assert tm.eval_time(Genotype(bits, 4)) == 1.0

    def test_expensive_optimum(self):
        opt = Genotype.from01("11")
        tm = make_time_model((1, 100), opt)
        assert tm.eval_time(opt) == 100.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            make_time_model((0, 1), Genotype.from01("1"))

    @given(st.integers(0, 2**20 - 1), st.integers(0, 2**20 - 1))
    def test_affine_in_hamming_distance(self, x, y):
        opt = Genotype((1 << 20) - 1, 20)
        tm = make_time_model((10.0, 2.0), opt)
        g1, g2 = Genotype(x, 20), Genotype(y, 20)
        h1 = g1.hamming(opt) / 20
        h2 = g2.hamming(opt) / 20
        lhs = tm.eval_time(g1) - tm.eval_time(g2)
        rhs = (h1 - h2) * (10.0 - 2.0)
        assert lhs == pytest.approx(rhs, abs=1e-12)


class TestAnkl:
    def test_length_formula(self):
        fn = generate_ankl(18, 5, 2, RandomSource(0))
        assert fn.length == 40

    def test_entries_in_unit_interval(self):
        fn = generate_ankl(6, 5, 2, RandomSource(1))
        assert all(0.0 <= v < 1.0 for t in fn.tables for v in t)

    def test_deterministic_in_seed(self):
        a = generate_ankl(4, 5, 2, RandomSource(9))
        b = generate_ankl(4, 5, 2, RandomSource(9))
        assert a.tables == b.tables

    def test_fitness_matches_plain_summation(self):
        fn = generate_ankl(4, 5, 2, RandomSource(3))
        rng = RandomSource(4)
        for _ in range(50):
            g = Genotype.random(fn.length, rng.split(_))
            expected = 0.0
            for i in range(fn.n_blocks):
                idx = 0
                for j in range(fn.k):
                    idx |= g.bit(2 * i + j) << j
                expected += fn.tables[i][idx]
            assert fn.fitness(g) == expected

    def test_single_block_optimum_is_table_argmax(self):
        fn = generate_ankl(1, 3, 1, RandomSource(11))
        opt, value = ankl_optimum(fn)
        best = max(range(8), key=lambda v: fn.tables[0][v])
        assert value == fn.tables[0][best]
        assert opt.bits == best

    def test_dp_equals_brute_force_small(self):
        fn = generate_ankl(3, 3, 1, RandomSource(21))
        opt, value = ankl_optimum(fn)
        brute = max(
            fn.fitness(Genotype(bits, fn.length)) for bits in range(1 << fn.length)
        )
        assert value == brute
        assert fn.fitness(opt) == value

    @pytest.mark.parametrize("n,k,stride,seed", [(8, 5, 2, 0), (16, 3, 1, 5), (4, 4, 4, 2)])
    def test_dp_equals_brute_force_parametrized(self, n, k, stride, seed):
        fn = generate_ankl(n, k, stride, RandomSource(seed))
        assert fn.length <= 20
        opt, value = ankl_optimum(fn)
        window = (1 << k) - 1
        table_matrix = np.array(fn.tables)
        all_bits = np.arange(1 << fn.length, dtype=np.int64)
        total = np.zeros(1 << fn.length)
        for i in range(n):
            total += table_matrix[i][(all_bits >> (stride * i)) & window]
        assert value == total.max()
        assert fn.fitness(opt) == value

    def test_dp_beats_random_genotypes(self):
        fn = generate_ankl(8, 5, 2, RandomSource(13))
        _, value = ankl_optimum(fn)
        rng = RandomSource(14)
        for i in range(10_000):
            assert fn.fitness(Genotype.random(fn.length, rng.split(i))) <= value


class TestPartitions:
    def test_dt_partition(self):
        assert dt_partition(2, 3) == ((0, 1, 2), (3, 4, 5))

    def test_ankl_partition_covers_disjointly(self):
        part = ankl_partition(8, 5, 2)  # length 20
        flat = [p for chunk in part for p in chunk]
        assert sorted(flat) == list(range(20))
        assert part[0] == (0, 1)
        assert part[-1] == (16, 17, 18, 19)

    def test_ankl_partition_stride_one(self):
        part = ankl_partition(4, 3, 1)  # length 6
        flat = [p for chunk in part for p in chunk]
        assert sorted(flat) == list(range(6))


class TestProblemInstance:
    def test_dt_problem_evaluate(self):
        p = dt_problem(10, 5, (100, 1))
        ones = Genotype((1 << 50) - 1, 50)
        assert p.evaluate(ones) == (50.0, 1.0)
        assert p.evaluate(ones.complement()) == (40.0, 100.0)

    def test_target_attainable(self):
        p = ankl_problem(8, 5, 2, 17, (1, 1))
        assert p.function.fitness(p.time_model.optimum) == p.target_value

    def test_length_mismatch_rejected(self):
        p = dt_problem(2, 5, (1, 1))
        with pytest.raises(ValueError):
            p.evaluate(Genotype(0, 9))

    def test_json_round_trip_ankl(self):
        p = ankl_problem(8, 5, 2, 23, (10, 1))
        doc = json.loads(json.dumps(instance_to_json(p)))
        q = instance_from_json(doc)
        assert q.target_value == p.target_value
        assert q.time_model == p.time_model
        assert q.sfx_partition == p.sfx_partition
        assert q.function.tables == p.function.tables
        g = Genotype.random(p.length, RandomSource(1))
        assert q.evaluate(g) == p.evaluate(g)

    def test_json_round_trip_dt_with_ratio_override(self):
        p = dt_problem(4, 5, (1, 1))
        q = instance_from_json(instance_to_json(p), ratio=(100, 1))
        assert q.time_model.a == 100.0
        assert q.evaluate(Genotype(0, 20))[1] == 100.0
