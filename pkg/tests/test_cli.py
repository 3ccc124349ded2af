import filecmp

import pytest

from repeaterscope.cli import main
from repeaterscope.csvio import read_rows

SMALL_CONFIG = """
seed = 11
trials = 2000
distances_km = 50, 100
n_segment_options = 2, 4
channel_options = 1, 4, 16
qpc_n_max = 4
qpc_m_max = 2
relay_channels = 128
relay_spacings_km = 5, 20
"""


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_CONFIG)
    return path


class TestRunExperiments:
    def test_relay_expectation(self, tmp_path, small_config):
        out = tmp_path / "out"
        assert main(["run", "relay-expectation", "--config", str(small_config),
                     "--out", str(out)]) == 0
        rows = read_rows(out / "relay-expectation.csv")
        relay = [r for r in rows if r["architecture"] == "relay"]
        bound = [r for r in rows if r["architecture"] == "bound"]
        assert len(relay) == 1 * 2 * 2  # channels x spacings x segment options
        assert len(bound) == 2  # one bound row per (channels, spacing)
        # every relay expectation sits below its bound row
        for b in bound:
            for r in relay:
                if r["distance_km"] == b["distance_km"] and r["channels"] == b["channels"]:
                    assert r["expected_pairs"] <= b["expected_pairs"] + 1e-12
        # and decreases with the segment count at fixed spacing
        for b in bound:
            column = sorted(
                (r["n_segments"], r["expected_pairs"])
                for r in relay
                if r["distance_km"] == b["distance_km"] and r["channels"] == b["channels"]
            )
            values = [v for _, v in column]
            assert all(x > y for x, y in zip(values, values[1:]))
        assert (out / "effective_config.txt").exists()

    def test_mtp_sweep_roundtrip(self, tmp_path, small_config):
        out = tmp_path / "out"
        assert main(["run", "mtp-sweep", "--config", str(small_config),
                     "--out", str(out)]) == 0
        rows = read_rows(out / "mtp-sweep.csv")
        assert len(rows) == 4  # 2 segment options x 2 distances
        for row in rows:
            assert row["architecture"] == "mtp"
            assert row["skr_per_channel_use"] == pytest.approx(
                row["skr_per_burst"] / row["channels"], rel=1e-12
            )
            assert row["schedule"].startswith("D=")

    def test_envelope_compare_has_all_variants(self, tmp_path, small_config):
        out = tmp_path / "out"
        assert main(["run", "envelope-compare", "--config", str(small_config),
                     "--out", str(out)]) == 0
        rows = read_rows(out / "envelope-compare.csv")
        variants = {row["architecture"] for row in rows}
        assert {"mtp-skr", "mtp-fth", "2gnc"} <= variants
        qpc_rows = [r for r in rows if r["architecture"] == "qpc"]
        for row in qpc_rows:
            assert row["schedule"].startswith("QPC(")

    def test_cost_compare_emits_cost_columns(self, tmp_path, small_config):
        out = tmp_path / "out"
        assert main(["run", "cost-compare", "--config", str(small_config),
                     "--out", str(out)]) == 0
        rows = read_rows(out / "cost-compare.csv")
        mtp_rows = [r for r in rows if r["architecture"] == "mtp-skr"]
        assert mtp_rows
        for row in mtp_rows:
            assert row["repeaters"] == row["n_segments"] - 1
            assert row["qubits"] == 2 * row["channels"] * row["n_segments"]
            if row["skr_per_burst"] > 0:
                assert row["qubits_per_key"] == pytest.approx(
                    row["qubits"] / row["skr_per_burst"], rel=1e-9
                )


class TestCsvRoundTrip:
    def test_reparsing_reproduces_values(self, tmp_path, small_config):
        out = tmp_path / "out"
        main(["run", "mtp-sweep", "--config", str(small_config), "--out", str(out)])
        path = out / "mtp-sweep.csv"
        rows = read_rows(path)
        from repeaterscope.csvio import write_rows

        rewritten = tmp_path / "rewritten.csv"
        write_rows(rewritten, rows)
        assert filecmp.cmp(path, rewritten, shallow=False)


class TestDeterminism:
    @pytest.mark.parametrize(
        "experiment",
        ["relay-expectation", "mtp-sweep", "envelope-compare", "cost-compare"],
    )
    def test_byte_identical_reruns(self, tmp_path, small_config, experiment):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            assert main(["run", experiment, "--config", str(small_config),
                         "--out", str(out), "--seed", "42"]) == 0
            outs.append(out / f"{experiment}.csv")
        assert filecmp.cmp(outs[0], outs[1], shallow=False)


class TestErrorPaths:
    def test_unknown_experiment_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["run", "teleport-everything"])
        assert excinfo.value.code == 2

    def test_bad_config_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("n_segments = 3\n")
        assert main(["run", "mtp-sweep", "--config", str(bad)]) == 2
        assert "power of two" in capsys.readouterr().err

    def test_missing_config_exits_2(self, tmp_path):
        assert main(["run", "mtp-sweep", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("warp_speed = 9\n")
        assert main(["run", "mtp-sweep", "--config", str(bad)]) == 2
        assert "unknown key" in capsys.readouterr().err
