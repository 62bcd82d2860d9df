import io
import subprocess
import sys
import textwrap
from importlib import resources

import pytest

from amdahl_limits import config
from amdahl_limits.cli import run
from amdahl_limits.config import ConfigError, parse_config
from amdahl_limits.dataio import sample_list_path
from amdahl_limits.ledger import FICTIVE_MACHINE, WorkloadKind
from amdahl_limits.modifiers import Accelerator, CooperativeTransfer
from amdahl_limits.timeline import DispatchMode


def data_file(name):
    return str(resources.files("amdahl_limits") / "data" / name)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stderr
    sys.stderr = err
    try:
        code = run(list(argv), out)
    finally:
        sys.stderr = old
    return code, out.getvalue(), err.getvalue()


def plot_rows(text):
    """Parse plotdata output into (header, rows) of the first table."""
    block = text.split("\n\n")[0]
    lines = block.splitlines()
    header = lines[0][2:].split("\t")
    rows = [dict(zip(header, line.split("\t"))) for line in lines[1:] if not line.startswith("#")]
    return header, rows


class TestConfig:
    def test_documented_example_parses(self):
        block = config.__doc__.split("::")[1].split("Modifier sections")[0]
        cfg = parse_config(textwrap.dedent(block))
        assert cfg.machine == FICTIVE_MACHINE
        assert cfg.workload.grid_period == pytest.approx(5000 / 1e9)
        assert cfg.timeline.n_workers == 4
        assert [type(m).__name__ for m in cfg.modifiers] == [
            "Accelerator", "PrecisionMode", "CooperativeTransfer"]

    def test_defaults(self):
        cfg = parse_config("")
        assert cfg.machine == FICTIVE_MACHINE
        assert cfg.workload.kind is WorkloadKind.HPL
        assert cfg.n_values[0] == 2
        assert cfg.timeline is None and cfg.modifiers == []

    def test_explicit_n_values(self):
        assert parse_config("[sweep]\nn_values = 2, 10, 1e3\n").n_values == [2, 10, 1000]

    def test_modifier_order_and_repeats(self):
        cfg = parse_config("[modifier:cooperative]\nmsg_scale = 0.5\n"
                           "[modifier:accelerator]\n"
                           "[modifier:cooperative#2]\nmsg_scale = 0.25\n")
        assert cfg.modifiers == [CooperativeTransfer(0.5), Accelerator(), CooperativeTransfer(0.25)]

    def test_timeline_section(self):
        cfg = parse_config("[timeline]\nn_workers = 3\nt_compute = 1, 2, 3\n"
                           "dispatch_mode = blocking\nclock_hz = 100\n")
        assert cfg.timeline.t_compute == (1.0, 2.0, 3.0)
        assert cfg.timeline.dispatch_mode is DispatchMode.BLOCKING
        assert cfg.timeline.clock_hz == 100

    @pytest.mark.parametrize("text,where", [
        ("[machine]\nt_addr = -1\n", "machine.t_addr"),
        ("[machine]\nt_adr = 1\n", "machine: unknown key"),
        ("[machine]\nclock_hz = fast\n", "machine.clock_hz"),
        ("[workload]\nkind = lu\n", "workload.kind"),
        ("[workload]\nscaling = weak\n", "workload.scaling"),
        ("[sweep]\nn_values = 1, 2\n", "sweep.n_values"),
        ("[timeline]\nn_workers = 2\n", "timeline"),
        ("[timeline]\nn_workers = 2\nt_compute = 1, 2, 3\n", "t_compute"),
        ("[modifier:warp]\n", "unknown modifier"),
        ("[plots]\n", "unknown section"),
        ("no section\n", "malformed"),
    ])
    def test_errors_name_the_field(self, text, where):
        with pytest.raises(ConfigError, match=where):
            parse_config(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            config.load_config(tmp_path / "absent.ini")

    @pytest.mark.parametrize("name", ["fictive_hpl.ini", "grid_5000.ini", "accelerator.ini",
                                      "two_workers.ini"])
    def test_bundled_configs_load(self, name):
        config.load_config(data_file(name))


class TestCommands:
    def test_model(self):
        code, out, _ = invoke("model", "--alpha", "0.999", "--n", "1024", "--output", "plotdata")
        assert code == 0
        _, rows = plot_rows(out)
        assert float(rows[0]["speedup"]) == pytest.approx(506.1789422, rel=1e-9)
        assert float(rows[0]["gain_limit"]) == pytest.approx(1000, rel=1e-9)

    def test_model_serial(self):
        code, out, _ = invoke("model", "--serial", "1e-7", "--n", "1e7", "--output", "plotdata")
        _, rows = plot_rows(out)
        assert float(rows[0]["efficiency"]) == pytest.approx(1 / (1e7 * 1e-7 + 1 - 1e-7), rel=1e-12)

    def test_sweep_peak(self):
        code, out, _ = invoke("sweep", "--config", data_file("fictive_hpl.ini"), "--output", "plotdata")
        assert code == 0
        header, rows = plot_rows(out)
        assert header[:3] == ["n", "nominal", "r_max"]
        assert "share_looping" in header
        r_max = [float(r["r_max"]) for r in rows]
        top = max(range(len(r_max)), key=r_max.__getitem__)
        assert 0 < top < len(r_max) - 1
        assert "# peak n=" in out

    def test_modify_reports_gain(self):
        code, out, _ = invoke("modify", "--config", data_file("accelerator.ini"), "--output", "plotdata")
        assert code == 0
        _, rows = plot_rows(out)
        ratios = [float(r["gain_ratio"]) for r in rows]
        assert ratios[0] > 4
        assert all(b <= a for a, b in zip(ratios, ratios[1:]))

    def test_simulate(self):
        code, out, _ = invoke("simulate", "--config", data_file("two_workers.ini"), "--trace")
        assert code == 0
        assert "collected w1" in out
        summary = out.splitlines()[1].split()
        assert summary[:4] == ["2", "2", "1", "0"]

    def test_simulate_single_worker_note(self, tmp_path):
        cfg = tmp_path / "one.ini"
        cfg.write_text("[timeline]\nn_workers = 1\nt_compute = 1\n")
        code, out, _ = invoke("simulate", "--config", str(cfg))
        assert code == 0
        assert "undefined for a single worker" in out

    def test_comm_ann(self):
        code, out, _ = invoke("comm", "--class", "ann", "--m", "1000", "--h", "2", "--output", "plotdata")
        _, rows = plot_rows(out)
        assert rows[0]["message_count"] == "1002000"

    def test_comm_brain(self):
        code, out, _ = invoke("comm", "--class", "brain", "--reduction", "100", "--output", "plotdata")
        _, rows = plot_rows(out)
        assert float(rows[0]["implied_gain"]) == pytest.approx(1e6, rel=0.02)

    def test_ingest(self):
        code, out, _ = invoke("ingest", "--csv", sample_list_path(), "--output", "plotdata")
        assert code == 0
        _, rows = plot_rows(out)
        assert len(rows) == 25
        assert rows[0]["cores"] == "10649600"

    def test_ingest_reports_rejects(self, tmp_path):
        f = tmp_path / "list.csv"
        f.write_text("rank,name,cores,rmax,rpeak\n1,a,10,5,4\n2,b,10,3,4\n")
        code, out, err = invoke("ingest", "--csv", str(f))
        assert code == 0
        assert f"{f}:2: rejected: inconsistent benchmark figures" in err

    def test_roofline(self):
        code, out, _ = invoke("roofline", "--output", "plotdata")
        _, rows = plot_rows(out)
        assert [r["class"] for r in rows] == ["hpl", "hpcg", "ann", "brain"]

    def test_deterministic(self):
        argv = ("sweep", "--config", data_file("grid_5000.ini"))
        assert invoke(*argv) == invoke(*argv)


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        (), ("frobnicate",), ("model", "--n", "4"), ("model", "--alpha", "0.5", "--serial", "0.5", "--n", "4"),
        ("comm", "--class", "hpl"), ("comm", "--class", "ann", "--m", "0"),
        ("sweep", "--config", "x.ini", "--output", "png"),
    ])
    def test_usage(self, argv):
        code, out, err = invoke(*argv)
        assert code == 1
        assert out == ""
        assert err

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[machine]\nt_addr = -1\n")
        code, _, err = invoke("sweep", "--config", str(cfg))
        assert code == 2
        assert "machine.t_addr" in err

    def test_missing_config(self, tmp_path):
        assert invoke("sweep", "--config", str(tmp_path / "none.ini"))[0] == 2

    def test_missing_column(self, tmp_path):
        f = tmp_path / "list.csv"
        f.write_text("rank,name,cores\n1,a,10\n")
        code, _, err = invoke("ingest", "--csv", str(f))
        assert code == 2
        assert "missing mandatory column" in err

    def test_simulate_without_timeline(self):
        assert invoke("simulate", "--config", data_file("fictive_hpl.ini"))[0] == 2

    def test_model_domain(self):
        assert invoke("model", "--alpha", "1.5", "--n", "4")[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "amdahl_limits", "roofline"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "brain" in proc.stdout
