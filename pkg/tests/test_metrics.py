"""NMSE, support classification, SNR, and OSPA."""

import numpy as np
import pytest

import blocksbl as bl
from blocksbl.errors import ZeroReference


class TestNmse:
    def test_perfect(self):
        assert bl.nmse(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0

    def test_zero_estimate(self):
        assert bl.nmse(np.array([1.0, 2.0]), np.zeros(2)) == 1.0

    def test_orthogonal(self):
        assert bl.nmse(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 2.0

    def test_zero_reference(self):
        with pytest.raises(ZeroReference):
            bl.nmse(np.zeros(3), np.ones(3))

    def test_complex(self):
        x = np.array([1.0 + 1j, 0.0])
        assert bl.nmse(x, 1j * x) == pytest.approx(2.0)


class TestSupportAccuracy:
    def test_identical(self):
        assert bl.support_accuracy([1, 3], [3, 1], 10) == 1.0

    def test_complementary(self):
        assert bl.support_accuracy([0, 1], [2, 3], 4) == 0.0

    def test_one_wrong_of_ten(self):
        assert bl.support_accuracy([1, 2], [1, 2, 7], 10) == pytest.approx(0.9)


class TestSnr:
    def test_snr_db(self):
        inst = bl.build_instance(np.ones(4), np.eye(4), [4])
        x = np.array([1.0, 1.0, 0.0, 0.0])
        # lam * ||x||^2 / N = 2 * 2 / 4 = 1 -> 0 dB
        assert bl.snr_db(inst, x, 2.0) == pytest.approx(0.0)

    def test_array_snr_db(self):
        psi = np.eye(3)
        x = np.array([3.0, 0.0, 0.0])
        # lam * ||psi x||^2 = 9 -> ~9.54 dB
        assert bl.array_snr_db(psi, x, 1.0) == pytest.approx(10 * np.log10(9.0))


class TestOspa:
    def test_equal_sets(self):
        assert bl.ospa([1.0, 2.0], [2.0, 1.0]) == 0.0

    def test_empty_vs_nonempty_is_cutoff(self):
        assert bl.ospa([], [10.0, 20.0]) == 5.0
        assert bl.ospa([10.0], []) == 5.0

    def test_both_empty(self):
        assert bl.ospa([], []) == 0.0

    def test_single_pair(self):
        assert bl.ospa([1.0], [0.0]) == pytest.approx(1.0)

    def test_cardinality_penalty(self):
        # one matched at zero error, one unmatched: (0 + 5)/2
        assert bl.ospa([0.0], [0.0, 50.0]) == pytest.approx(2.5)

    def test_symmetry_and_bounds(self, rng):
        for _ in range(50):
            a = rng.uniform(-90, 90, size=int(rng.integers(0, 6)))
            b = rng.uniform(-90, 90, size=int(rng.integers(0, 6)))
            d1, d2 = bl.ospa(a, b), bl.ospa(b, a)
            assert d1 == pytest.approx(d2, abs=1e-12)
            assert 0.0 <= d1 <= 5.0 + 1e-12

    def test_zero_iff_equal_multisets(self, rng):
        a = np.array([1.0, 1.0, 2.0])
        assert bl.ospa(a, a.copy()) == 0.0
        assert bl.ospa(a, [1.0, 2.0, 2.0]) > 1e-12

    def test_assignment_is_optimal(self):
        # greedy matching would pair 0 with 1 and pay the cutoff for 10;
        # the optimal assignment pairs (0, 1) and (1, 10) never worse
        est = [0.0, 9.0]
        truth = [1.0, 10.0]
        assert bl.ospa(est, truth) == pytest.approx(1.0)

    def test_invalid_cutoff(self):
        with pytest.raises(ValueError):
            bl.ospa([1.0], [1.0], cutoff=0.0)
