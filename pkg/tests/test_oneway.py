import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repeaterscope.oneway import (
    OnewayParams,
    QpcCode,
    logical_flip_prob,
    oneway_skr,
    photon_survival,
    qpc_operation_counts,
    qpc_success_prob,
    station_survival,
)


def brute_force_success(code, eta):
    n, m = code.n_blocks, code.m_per_block
    total = 0.0
    for pattern in product((0, 1), repeat=n * m):
        arrived = sum(pattern)
        prob = eta**arrived * (1 - eta) ** (n * m - arrived)
        blocks = [pattern[b * m:(b + 1) * m] for b in range(n)]
        if all(any(blk) for blk in blocks) and any(all(blk) for blk in blocks):
            total += prob
    return total


class TestQpcSuccessProb:
    def test_lossless(self):
        for n, m in ((1, 1), (3, 2), (5, 4)):
            assert qpc_success_prob(QpcCode(n, m), 1.0) == 1.0

    def test_two_by_two_example(self):
        assert qpc_success_prob(QpcCode(2, 2), 0.9) == pytest.approx(
            0.99**2 - 0.18**2, abs=1e-15
        )
        assert qpc_success_prob(QpcCode(2, 2), 0.9) == pytest.approx(0.9477, abs=1e-12)

    def test_single_photon_code(self):
        assert qpc_success_prob(QpcCode(1, 1), 0.73) == pytest.approx(0.73, abs=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("eta", [0.5, 0.9, 0.99])
    def test_matches_brute_force(self, n, m, eta):
        code = QpcCode(n, m)
        assert qpc_success_prob(code, eta) == pytest.approx(
            brute_force_success(code, eta), abs=1e-12
        )

    @given(st.integers(1, 10), st.integers(1, 8), st.floats(0.0, 1.0))
    @settings(max_examples=60)
    def test_stays_in_unit_interval(self, n, m, eta):
        assert 0.0 <= qpc_success_prob(QpcCode(n, m), eta) <= 1.0

    @given(st.integers(1, 8), st.integers(1, 6), st.floats(0.05, 0.9), st.floats(0.01, 0.09))
    @settings(max_examples=60)
    def test_nondecreasing_in_eta(self, n, m, eta, bump):
        code = QpcCode(n, m)
        assert qpc_success_prob(code, eta + bump) >= qpc_success_prob(code, eta) - 1e-12

    def test_code_bounds(self):
        with pytest.raises(ValueError):
            QpcCode(0, 1)
        with pytest.raises(ValueError):
            QpcCode(71, 1)
        with pytest.raises(ValueError):
            QpcCode(1, 21)


class TestStationSurvival:
    def test_short_hop_limit(self):
        assert photon_survival(1e-9, 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_two_km_hop(self):
        assert photon_survival(2.0, 0.9, 20.0) == pytest.approx(
            0.9 * math.exp(-0.1), abs=1e-15
        )
        assert photon_survival(2.0, 0.9, 20.0) == pytest.approx(0.81435, abs=1e-5)

    def test_end_to_end_nonincreasing_in_distance(self):
        code = QpcCode(4, 3)
        values = [
            station_survival(
                OnewayParams(code=code, spacing_km=2.0, total_distance_km=d, eta_c=0.9)
            )
            for d in (50, 100, 200, 400)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_station_count_ceils(self):
        params = OnewayParams(
            code=QpcCode(2, 2), spacing_km=3.0, total_distance_km=100.0
        )
        assert params.n_stations == 34

    def test_spacing_bounds_enforced(self):
        with pytest.raises(ValueError):
            OnewayParams(code=QpcCode(2, 2), spacing_km=0.5, total_distance_km=100.0)
        with pytest.raises(ValueError):
            OnewayParams(code=QpcCode(2, 2), spacing_km=5.0, total_distance_km=100.0)


class TestOnewaySkr:
    def test_perfect_operations_perfect_channel(self):
        params = OnewayParams(
            code=QpcCode(2, 2),
            spacing_km=1.0,
            total_distance_km=2.0,
            eta_c=1.0,
            eps_g=0.0,
            l_att_km=1e12,
        )
        report = oneway_skr(params)
        assert report.skr_per_channel_use == pytest.approx(1.0, abs=1e-9)

    def test_flip_accumulation_example(self):
        # two stations with logical flip probability 0.1 give a QBER of
        # (1 - 0.8^2) / 2 = 0.18
        flip = 0.5 * (1 - (1 - 2 * 0.1) ** 2)
        assert flip == pytest.approx(0.18, abs=1e-15)
        params = OnewayParams(
            code=QpcCode(2, 2),
            spacing_km=1.0,
            total_distance_km=2.0,
            eta_c=1.0,
            eps_g=0.02,  # eps_l = 4 * (0.02 + 0.005) = 0.1
        )
        assert logical_flip_prob(params) == pytest.approx(0.1, abs=1e-15)
        report = oneway_skr(params)
        e_z = report.final_state.coeffs[2] + report.final_state.coeffs[3]
        assert e_z == pytest.approx(0.18, abs=1e-12)

    def test_zero_coefficient_reduces_to_pure_erasure(self):
        params = OnewayParams(
            code=QpcCode(4, 3),
            spacing_km=2.0,
            total_distance_km=100.0,
            eta_c=0.9,
            eps_g=1e-3,
            logical_error_coeff=0.0,
        )
        report = oneway_skr(params)
        assert report.secret_fraction == 1.0
        assert report.skr_per_channel_use == pytest.approx(
            station_survival(params), abs=1e-15
        )

    def test_saturated_errors_zero_key(self):
        params = OnewayParams(
            code=QpcCode(10, 10),
            spacing_km=1.0,
            total_distance_km=10.0,
            eta_c=1.0,
            eps_g=0.01,  # eps_l = 100 * 0.0125 > 0.5
        )
        report = oneway_skr(params)
        assert logical_flip_prob(params) >= 0.5
        assert report.skr_per_channel_use == 0.0
        assert report.costs.qubits_per_key is None

    def test_skr_nonincreasing_in_gate_error(self):
        values = []
        for eps_g in (1e-5, 1e-4, 5e-4, 1e-3):
            params = OnewayParams(
                code=QpcCode(3, 2),
                spacing_km=2.0,
                total_distance_km=50.0,
                eta_c=0.9,
                eps_g=eps_g,
            )
            values.append(oneway_skr(params).skr_per_channel_use)
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


class TestOperationCounts:
    def test_unit_code_single_station(self):
        report = qpc_operation_counts(QpcCode(1, 1), 1)
        assert report.two_qubit_gates == 1
        assert report.measurements == 2
        assert report.qubits_per_burst == 3
        assert report.repeaters == 0

    def test_example_scaling(self):
        report = qpc_operation_counts(QpcCode(4, 3), 10)
        assert report.two_qubit_gates == 120
        assert report.measurements == 240
        assert report.qubits_per_burst == 360

    def test_linear_in_stations(self):
        one = qpc_operation_counts(QpcCode(5, 2), 1)
        many = qpc_operation_counts(QpcCode(5, 2), 7)
        assert many.two_qubit_gates == 7 * one.two_qubit_gates
        assert many.measurements == 7 * one.measurements
        assert many.qubits_per_burst == 7 * one.qubits_per_burst
