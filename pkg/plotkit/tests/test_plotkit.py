"""plotkit unit tests against synthetic CSVs (no simulator involved)."""

import math

import matplotlib.pyplot as plt
import pytest

from plotkit import FigureSpec, SchemaError, plot_phase, plot_trajectories
from plotkit.cli import main as cli_main
from plotkit.reader import read_sweep_csv

HEADER = (
    "engine,M,epsilon,m_eps,t,trials,mean_R,mean_ci95,zero_frac,zero_ci95,"
    "exact_mean,exact_zero_prob,bound_mean,bound_accuracy,paper_floor,"
    "aborted_trials"
)


def _row(eps, m_eps, t, mean_r, zero_frac, exact_mean, bound_mean="", floor=""):
    return (
        f"counts,20,{eps},{m_eps},{t},1000,{mean_r},0.01,{zero_frac},0.01,"
        f"{exact_mean},0.9,{bound_mean},0.8,{floor},0"
    )


@pytest.fixture()
def subcritical_csv(tmp_path):
    lines = [HEADER]
    for t in range(6):
        e = 0.25 * (1 - 0.2**t)
        lines.append(_row(0.01, 0.2, t, e * 1.01, 0.9, e, bound_mean=0.25))
    path = tmp_path / "sub.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def phase_csv(tmp_path):
    lines = [HEADER]
    for k, m_eps in enumerate([0.2, 0.6, 1.0, 1.4, 1.8]):
        eps = m_eps / 20
        for t in (0, 3):
            mean = (m_eps**t) if m_eps > 1 else m_eps
            lines.append(_row(eps, m_eps, t, mean, max(0.05, 1 - 0.4 * k), mean))
    path = tmp_path / "phase.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestReader:
    def test_missing_column_raises(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError):
            read_sweep_csv(bad, required=("epsilon", "t"))

    def test_empty_data_raises(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEADER + "\n")
        with pytest.raises(SchemaError):
            read_sweep_csv(empty, required=("epsilon",))

    def test_unknown_columns_ignored(self, tmp_path):
        path = tmp_path / "extra.csv"
        path.write_text("epsilon,t,mystery\n0.1,0,what\n")
        rows = read_sweep_csv(path, required=("epsilon", "t"))
        assert rows[0]["epsilon"] == 0.1
        assert rows[0]["mystery"] == "what"

    def test_empty_cells_become_none(self, subcritical_csv):
        rows = read_sweep_csv(subcritical_csv, required=("paper_floor",))
        assert rows[0]["paper_floor"] is None
        assert rows[0]["bound_mean"] == 0.25


class TestTrajectories:
    def test_renders_file_and_bound_line(self, subcritical_csv, tmp_path):
        out = tmp_path / "traj.png"
        fig = plot_trajectories(
            FigureSpec(input=str(subcritical_csv), kind="trajectories", out=str(out))
        )
        assert out.stat().st_size > 0
        ax = fig.axes[0]
        horiz = [
            line.get_ydata()[0]
            for line in ax.lines
            if len(set(line.get_ydata())) == 1 and len(line.get_xdata()) >= 2
        ]
        assert any(math.isclose(y, 0.25) for y in horiz)
        assert ax.get_yscale() == "linear"  # all m_eps <= 1
        plt.close(fig)

    def test_log_scale_when_supercritical(self, phase_csv, tmp_path):
        out = tmp_path / "traj2.png"
        fig = plot_trajectories(
            FigureSpec(input=str(phase_csv), kind="trajectories", out=str(out))
        )
        assert fig.axes[0].get_yscale() == "log"
        plt.close(fig)

    def test_repeat_runs_identical_series(self, subcritical_csv, tmp_path):
        spec = FigureSpec(
            input=str(subcritical_csv),
            kind="trajectories",
            out=str(tmp_path / "t.png"),
        )
        figs = [plot_trajectories(spec), plot_trajectories(spec)]
        sizes = [tuple(f.get_size_inches()) for f in figs]
        data = [
            [tuple(map(tuple, line.get_xydata())) for line in f.axes[0].lines]
            for f in figs
        ]
        assert sizes[0] == sizes[1]
        assert data[0] == data[1]
        for f in figs:
            plt.close(f)

    def test_missing_columns_schema_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("epsilon,t\n0.1,0\n")
        with pytest.raises(SchemaError):
            plot_trajectories(
                FigureSpec(input=str(bad), kind="trajectories", out=str(tmp_path / "x.png"))
            )


class TestPhase:
    def test_marker_at_critical_point(self, phase_csv, tmp_path):
        out = tmp_path / "phase.png"
        fig = plot_phase(
            FigureSpec(input=str(phase_csv), kind="phase", out=str(out))
        )
        assert out.stat().st_size > 0
        for ax in fig.axes:
            vertical = [
                line.get_xdata()[0]
                for line in ax.lines
                if len(set(line.get_xdata())) == 1
            ]
            assert 1.0 in vertical
        assert fig.axes[0].get_yscale() == "log"
        plt.close(fig)

    def test_slices_requested_t(self, phase_csv, tmp_path):
        fig = plot_phase(
            FigureSpec(
                input=str(phase_csv), kind="phase", out=str(tmp_path / "p.png"), t=0
            )
        )
        assert "t=0" in fig.axes[0].get_ylabel()
        plt.close(fig)

    def test_zero_frac_curve_decreasing(self, phase_csv, tmp_path):
        fig = plot_phase(
            FigureSpec(input=str(phase_csv), kind="phase", out=str(tmp_path / "q.png"))
        )
        zero_ax = fig.axes[1]
        ys = list(zero_ax.lines[0].get_ydata())
        assert all(b <= a for a, b in zip(ys, ys[1:]))
        plt.close(fig)

    def test_empty_grid_schema_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEADER + "\n")
        with pytest.raises(SchemaError):
            plot_phase(
                FigureSpec(input=str(empty), kind="phase", out=str(tmp_path / "x.png"))
            )


class TestCli:
    def test_phase_command(self, phase_csv, tmp_path):
        out = tmp_path / "cli_phase.png"
        assert cli_main(["phase", "--input", str(phase_csv), "--out", str(out)]) == 0
        assert out.stat().st_size > 0

    def test_trajectories_command(self, subcritical_csv, tmp_path):
        out = tmp_path / "cli_traj.png"
        code = cli_main(
            ["trajectories", "--input", str(subcritical_csv), "--out", str(out)]
        )
        assert code == 0
        assert out.stat().st_size > 0

    def test_vector_format_flag(self, subcritical_csv, tmp_path):
        out = tmp_path / "traj.svg"
        code = cli_main(
            ["trajectories", "--input", str(subcritical_csv), "--out", str(out),
             "--format", "svg"]
        )
        assert code == 0
        assert out.read_bytes().startswith(b"<?xml")

    def test_schema_error_exit_1(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert cli_main(["phase", "--input", str(bad), "--out", str(tmp_path / "x.png")]) == 1

    def test_missing_flag_exit_1(self):
        assert cli_main(["phase", "--input", "x.csv"]) == 1
