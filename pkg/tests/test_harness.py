"""Tests for the experiment harness: feasibility matrices, sweeps and CSV output."""

import csv
import io

import numpy as np
import pytest

from twincontract.core.contract import design_contract
from twincontract.core.economics import Contract, mrp_utility, msp_expected_utility
from twincontract.experiments.harness import (
    MECHANISMS,
    STATUS_NO_ADMISSIBLE,
    STATUS_OK,
    parse_mechanisms,
    run_feasibility_matrix,
    run_mechanism,
    sweep_data_size,
    sweep_header,
    write_sweep_csv,
)
from twincontract.experiments.scenario import BITS_PER_MB, load_default_scenario, parse_scenario


def _by_mechanism(rows, mechanism):
    return [r for r in rows if r.mechanism == mechanism]


@pytest.fixture
def sweep_rows(default_scenario):
    """Five data sizes from 100 MB to 200 MB, all three mechanisms."""
    sizes = [mb * BITS_PER_MB for mb in (100, 125, 150, 175, 200)]
    return sweep_data_size(default_scenario, data_bits=sizes)


@pytest.fixture(scope="module")
def default_sweep():
    """The shipped scenario's own sweep section (100..200 MB in 6 points)."""
    return sweep_data_size(load_default_scenario())


class TestParseMechanisms:
    """Tests for mechanism names and CLI aliases."""

    def test_aliases_and_order(self):
        """Verify aliases resolve to canonical names, returned in harness order."""
        assert parse_mechanisms("social,asymmetric") == ("asymmetric", "social-welfare")
        assert parse_mechanisms(["complete", "Complete-Info"]) == ("complete-info",)
        assert parse_mechanisms(MECHANISMS) == MECHANISMS

    def test_unknown_and_empty(self):
        """Verify unknown names and an empty selection are rejected."""
        with pytest.raises(ValueError, match="unknown mechanism"):
            parse_mechanisms("auction")
        with pytest.raises(ValueError):
            parse_mechanisms(" , ")

    def test_run_mechanism_rejects_unknown(self, default_scenario):
        with pytest.raises(ValueError):
            run_mechanism("auction", default_scenario.grid, default_scenario.spectrum, default_scenario.params)


class TestFeasibilityMatrix:
    """Tests for the type-by-item utility matrix."""

    def test_default_scenario(self, default_scenario):
        """Verify IR, diagonal dominance and own utility rising with type on the default scenario."""
        result = run_feasibility_matrix(default_scenario)
        u = result.utilities
        assert u.shape == (4, 4)
        assert result.passed
        for n in range(4):
            assert u[n, n] >= -1e-9
            assert np.all(u[n, n] >= u[n] - 1e-9)
        own = np.diag(u)
        assert np.all(np.diff(own) >= -1e-9)

    def test_single_type_is_zero(self):
        """Verify a single type gets a 1x1 matrix holding zero surplus."""
        scenario = parse_scenario({"economics": {"thetas": [2e11]}})
        result = run_feasibility_matrix(scenario)
        assert result.utilities.shape == (1, 1)
        assert result.utilities[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert result.passed

    def test_entries_match_direct_evaluation(self):
        """Verify every entry equals R_j - b_j^2 / theta_n computed item by item."""
        scenario = parse_scenario({
            "economics": {"thetas": [1e11, 2.5e11, 4e11], "probabilities": [0.2, 0.5, 0.3]},
        })
        result = run_feasibility_matrix(scenario)
        contract = result.outcome.contract
        thetas = scenario.spectrum.thetas
        for n in range(3):
            for j in range(3):
                assert result.utilities[n, j] == pytest.approx(mrp_utility(contract[j], thetas[n]), rel=1e-12)

    def test_other_data_size(self, default_scenario):
        result = run_feasibility_matrix(default_scenario, data_bits=150 * BITS_PER_MB)
        expected = design_contract(
            default_scenario.grid, default_scenario.spectrum, default_scenario.with_data_bits(150 * BITS_PER_MB)
        )
        assert result.outcome.contract == expected.contract
        assert result.passed


class TestSweep:
    """Tests for the data-size sweep."""

    def test_row_count_and_order(self, sweep_rows):
        """Verify 5 sizes x 3 mechanisms give 15 rows ordered by mechanism then size."""
        assert len(sweep_rows) == 15
        assert [r.mechanism for r in sweep_rows] == [m for m in MECHANISMS for _ in range(5)]
        assert all(r.status == STATUS_OK for r in sweep_rows)
        for mechanism in MECHANISMS:
            sizes = [r.data_bits for r in _by_mechanism(sweep_rows, mechanism)]
            assert sizes == sorted(sizes)

    def test_default_sweep_covers_scenario_sizes(self, default_sweep, default_scenario):
        """Verify the default sweep solves every configured size for every mechanism."""
        sizes = list(default_scenario.sweep_data_bits)
        assert len(sizes) == 6
        assert len(default_sweep) == 3 * len(sizes)
        for mechanism in MECHANISMS:
            rows = _by_mechanism(default_sweep, mechanism)
            assert [r.data_bits for r in rows] == sizes
            assert all(r.status == STATUS_OK and r.msp_utility is not None for r in rows)

    def test_complete_info_leaves_no_surplus(self, default_sweep):
        """Verify complete-information rows leave the MRPs nothing at every size."""
        assert all(r.mrp_sum_utility == 0.0 for r in _by_mechanism(default_sweep, "complete-info"))

    @pytest.mark.parametrize("mechanism", MECHANISMS)
    def test_msp_utility_falls_with_data_size(self, default_sweep, mechanism):
        """Verify MSP utility is non-increasing in D whatever the mechanism."""
        values = [r.msp_utility for r in _by_mechanism(default_sweep, mechanism)]
        assert len(values) == 6
        assert all(later <= earlier for earlier, later in zip(values, values[1:]))

    def test_mechanism_orderings(self, default_sweep):
        """Verify complete-info >= asymmetric on MSP utility and social >= asymmetric >= 0 on MRP surplus."""
        asymmetric = _by_mechanism(default_sweep, "asymmetric")
        complete = _by_mechanism(default_sweep, "complete-info")
        social = _by_mechanism(default_sweep, "social-welfare")
        for a, c, s in zip(asymmetric, complete, social):
            assert c.msp_utility >= a.msp_utility - 1e-9 * abs(a.msp_utility)
            assert s.mrp_sum_utility >= a.mrp_sum_utility - 1e-9
            assert a.mrp_sum_utility >= 0.0

    @pytest.mark.parametrize("mechanism", ["asymmetric", "social-welfare"])
    def test_mrp_surplus_grows_with_data_size(self, default_sweep, mechanism):
        """Verify the MRP surplus is non-decreasing in D."""
        values = [r.mrp_sum_utility for r in _by_mechanism(default_sweep, mechanism)]
        assert all(later >= earlier - 1e-9 for earlier, later in zip(values, values[1:]))

    def test_row_matches_single_design(self, default_scenario, sweep_rows):
        """Verify a sweep row carries exactly what a direct design call returns."""
        outcome = design_contract(default_scenario.grid, default_scenario.spectrum, default_scenario.params)
        row = sweep_rows[0]
        assert row.data_bits == 100 * BITS_PER_MB
        assert row.bandwidths == outcome.contract.bandwidths
        assert row.rewards == outcome.contract.rewards
        assert row.msp_utility == outcome.msp_utility

    def test_oversized_payload_fails_without_aborting(self, default_scenario):
        """Verify a size with no admissible bandwidth becomes a failed row."""
        rows = sweep_data_size(default_scenario, mechanisms="asymmetric", data_bits=[1e12, 100 * BITS_PER_MB])
        assert [r.status for r in rows] == [STATUS_OK, STATUS_NO_ADMISSIBLE]
        failed = rows[1]
        assert failed.msp_utility is None
        assert failed.bandwidths == []

    def test_workers_do_not_change_rows(self, default_scenario):
        """Verify threaded execution returns the serial rows in the same order."""
        sizes = [100 * BITS_PER_MB, 160 * BITS_PER_MB, 200 * BITS_PER_MB]
        serial = sweep_data_size(default_scenario, data_bits=sizes)
        threaded = sweep_data_size(default_scenario, data_bits=sizes, workers=4)
        assert serial == threaded

    def test_rejects_zero_workers(self, default_scenario):
        with pytest.raises(ValueError):
            sweep_data_size(default_scenario, workers=0)


class TestSweepCsv:
    """Tests for sweep CSV emission."""

    def _render(self, rows, scenario):
        stream = io.StringIO()
        write_sweep_csv(rows, stream, scenario.digest, scenario.spectrum.size)
        return stream.getvalue()

    def test_header(self):
        assert sweep_header(2) == [
            "scenario_hash", "mechanism", "data_bits", "b_1", "b_2", "R_1", "R_2",
            "msp_utility", "mrp_sum_utility", "status",
        ]

    def test_byte_identical_across_runs(self, default_scenario, sweep_rows):
        """Verify the same scenario renders byte-identical CSV on a second run."""
        again = sweep_data_size(default_scenario, data_bits=[r.data_bits for r in sweep_rows[:5]])
        assert self._render(sweep_rows, default_scenario) == self._render(again, default_scenario)

    def test_msp_utility_recomputed_from_columns(self, default_scenario, default_sweep):
        """Verify each row's msp_utility matches a recomputation from its own b and R columns."""
        text = self._render(default_sweep, default_scenario)
        records = list(csv.DictReader(io.StringIO(text)))
        assert len(records) == 18
        for record in records:
            assert record["scenario_hash"] == default_scenario.digest
            b = [float(record[f"b_{n}"]) for n in range(1, 5)]
            r = [float(record[f"R_{n}"]) for n in range(1, 5)]
            params = default_scenario.with_data_bits(float(record["data_bits"]))
            expected = msp_expected_utility(Contract.from_vectors(b, r), default_scenario.spectrum, params)
            assert float(record["msp_utility"]) == pytest.approx(expected, rel=1e-9)

    def test_failed_rows_have_empty_cells(self, default_scenario):
        """Verify a failed row keeps empty numeric cells and its status."""
        rows = sweep_data_size(default_scenario, mechanisms="asymmetric", data_bits=[1e12])
        text = self._render(rows, default_scenario)
        record = next(csv.DictReader(io.StringIO(text)))
        assert record["status"] == STATUS_NO_ADMISSIBLE
        assert record["b_1"] == ""
        assert record["msp_utility"] == ""
