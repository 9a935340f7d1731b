import numpy as np
import pytest

from qcausal.causality import is_local_channel, is_supported_on, operator_schmidt_values
from qcausal.sampling import (
    HISTOGRAM_BINS,
    MeasureZeroStats,
    RngStream,
    haar_local_unitary,
    haar_unitary,
    measure_zero_experiment,
    random_density,
    random_hermitian,
    random_kraus_channel,
    random_sorkin_scenario,
)
from qcausal.channels import identity_channel
from qcausal.tensor import Bipartition, SystemDims, all_bipartitions, is_unitary


class TestRngStream:
    def test_same_key_same_sequence(self):
        a = RngStream(7, 3).generator().standard_normal(10)
        b = RngStream(7, 3).generator().standard_normal(10)
        assert np.array_equal(a, b)

    def test_streams_are_distinct(self):
        a = RngStream(7, 0).generator().standard_normal(10)
        b = RngStream(7, 1).generator().standard_normal(10)
        c = RngStream(8, 0).generator().standard_normal(10)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_substream_offsets(self):
        s = RngStream(5, 10)
        assert s.substream(4) == RngStream(5, 14)
        assert s.substream(0) == s

    def test_validation(self):
        with pytest.raises(ValueError, match="seed"):
            RngStream(-1)
        with pytest.raises(ValueError, match="stream"):
            RngStream(0, 2**64)


class TestHaarUnitary:
    def test_unitarity(self):
        s = RngStream(40)
        for i, n in enumerate([2, 3, 4, 6]):
            u = haar_unitary(n, s.substream(i))
            np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)

    def test_deterministic_from_stream(self):
        assert np.array_equal(haar_unitary(4, RngStream(41)), haar_unitary(4, RngStream(41)))

    def test_trace_second_moment(self):
        # Haar average of |tr U|^2 over U(n) is exactly 1; check the sampler
        # hits it well within Monte Carlo error (sd ~ 1/sqrt(N)).
        g = RngStream(42).generator()
        n_samples = 20_000
        acc = 0.0
        for _ in range(n_samples):
            acc += abs(np.trace(haar_unitary(4, g))) ** 2
        assert abs(acc / n_samples - 1.0) < 0.05

    def test_accepts_plain_generator(self):
        u = haar_unitary(3, np.random.default_rng(0))
        assert is_unitary(u)


class TestOtherSamplers:
    def test_local_unitary_is_product_everywhere(self):
        dims = SystemDims((2, 2, 2))
        u = haar_local_unitary(dims, RngStream(43))
        assert is_unitary(u)
        for part in all_bipartitions(dims):
            s = operator_schmidt_values(u, part)
            assert s[1] < 1e-12

    def test_random_density(self):
        rho = random_density(5, RngStream(44))
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
        np.testing.assert_allclose(np.trace(rho), 1.0, atol=1e-14)
        assert np.linalg.eigvalsh(rho).min() > -1e-14

    def test_random_kraus_channel_is_unital(self):
        c = random_kraus_channel(SystemDims((2, 3)), 4, RngStream(45))
        np.testing.assert_allclose(c.apply(np.eye(6)), np.eye(6), atol=1e-10)
        assert c.nkraus == 4

    def test_random_hermitian(self):
        h = random_hermitian(4, RngStream(46))
        np.testing.assert_allclose(h, h.conj().T, atol=1e-14)

    def test_random_scenario_is_admissible(self):
        part = Bipartition.split(SystemDims((2, 3)), (0,))
        s = random_sorkin_scenario(part, identity_channel(part.dims), RngStream(47))
        # the constructor validates; double-check the two locality facts
        assert is_local_channel(s.prep, part.left)
        assert is_supported_on(s.observable, part.right, part.dims)


class TestMeasureZeroExperiment:
    def test_global_sampler_finds_no_products(self):
        stats = measure_zero_experiment(
            SystemDims((2, 2)), 25, 1e-6, RngStream(48), sampler="global"
        )
        assert isinstance(stats, MeasureZeroStats)
        assert stats.count_product_within_tol == 0
        assert stats.min_second_schmidt > 1e-6
        assert stats.min_product_distance > 1e-6

    def test_local_sampler_hits_every_time(self):
        stats = measure_zero_experiment(
            SystemDims((2, 2)), 25, 1e-6, RngStream(49), sampler="local"
        )
        assert stats.count_product_within_tol == 25
        assert stats.min_second_schmidt < 1e-10
        assert stats.min_product_distance < 1e-6

    def test_histogram_accounts_for_every_sample(self):
        stats = measure_zero_experiment(
            SystemDims((2, 2)), 30, 1e-6, RngStream(50), sampler="global"
        )
        assert sum(stats.histogram_counts) == 30
        assert len(stats.histogram_counts) == HISTOGRAM_BINS
        assert len(stats.histogram_edges) == HISTOGRAM_BINS + 1
        np.testing.assert_allclose(stats.histogram_edges[0], 0.0)
        np.testing.assert_allclose(stats.histogram_edges[-1], np.sqrt(2.0))

    def test_records_and_per_sample_reproducibility(self):
        base = RngStream(51)
        stats = measure_zero_experiment(SystemDims((2, 2)), 10, 1e-6, base)
        assert [r["sample_id"] for r in stats.records] == list(range(10))
        # sample 7 can be regenerated in isolation from its substream
        u = haar_unitary(4, base.substream(7).generator())
        worst = max(
            operator_schmidt_values(u, p)[1]
            for p in all_bipartitions(SystemDims((2, 2)))
        )
        assert stats.records[7]["second_schmidt"] == worst
        assert stats.records[7]["seed"] == 51

    def test_rerun_is_bitwise_identical(self):
        a = measure_zero_experiment(SystemDims((2, 2)), 8, 1e-6, RngStream(52))
        b = measure_zero_experiment(SystemDims((2, 2)), 8, 1e-6, RngStream(52))
        assert a == b

    def test_qubit_qutrit_runs(self):
        stats = measure_zero_experiment(SystemDims((2, 3)), 5, 1e-6, RngStream(53))
        assert stats.count_product_within_tol == 0
        np.testing.assert_allclose(stats.histogram_edges[-1], np.sqrt(3.0))

    def test_validation(self):
        with pytest.raises(ValueError, match="sampler"):
            measure_zero_experiment(SystemDims((2, 2)), 5, 1e-6, RngStream(0), "hybrid")
        with pytest.raises(ValueError, match="sample"):
            measure_zero_experiment(SystemDims((2, 2)), 0, 1e-6, RngStream(0))
