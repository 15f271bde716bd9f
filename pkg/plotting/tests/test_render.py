import csv
import math
import os
import shutil

import pytest

from regretplots import AggregateCsvError, PlotSpec, load_series, render
from regretplots.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")
RANDOM_CSV = os.path.join(DATA, "sample_random.csv")
WEIGHTED_CSV = os.path.join(DATA, "sample_weighted.csv")
SINGLE_CSV = os.path.join(DATA, "sample_single_round.csv")
GOLDEN = os.path.join(DATA, "golden_comparison.png")


def two_series_spec(out_path, kind="optimal", title="regret comparison"):
    return PlotSpec(
        csv_paths=[RANDOM_CSV, WEIGHTED_CSV],
        labels=["random exploration", "weighted exploration"],
        out_path=str(out_path),
        kind=kind,
        title=title,
    )


class TestLoadSeries:
    def test_parses_schema(self):
        series = load_series(RANDOM_CSV, "optimal")
        assert series.algorithm == "ac-etgs-random"
        assert series.rounds[0] == 10 and series.rounds[-1] == 400
        assert len(series.mean) == len(series.std) == len(series.rounds)

    def test_pessimal_columns(self):
        opt = load_series(RANDOM_CSV, "optimal")
        pess = load_series(RANDOM_CSV, "pessimal")
        assert all(p == pytest.approx(0.8 * o) for p, o in zip(pess.mean, opt.mean))

    def test_missing_file(self):
        with pytest.raises(AggregateCsvError, match="cannot read"):
            load_series(os.path.join(DATA, "nope.csv"), "optimal")

    def test_missing_columns(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("algorithm,local_round\na,1\n")
        with pytest.raises(AggregateCsvError, match="missing column"):
            load_series(str(bad), "optimal")

    def test_multiple_series_in_one_file_rejected(self, tmp_path):
        bad = tmp_path / "two.csv"
        with open(RANDOM_CSV) as fh:
            rows = fh.read().splitlines()
        rows.append(rows[1].replace("ac-etgs-random", "other-alg"))
        bad.write_text("\n".join(rows) + "\n")
        with pytest.raises(AggregateCsvError, match="multiple series"):
            load_series(str(bad), "optimal")


class TestRender:
    def test_two_series_chart_written(self, tmp_path):
        out = render(two_series_spec(tmp_path / "fig.png"))
        assert os.path.getsize(out) > 10_000

    def test_single_round_degenerate(self, tmp_path):
        spec = PlotSpec(
            csv_paths=[SINGLE_CSV],
            labels=["one point"],
            out_path=str(tmp_path / "point.png"),
        )
        assert os.path.exists(render(spec))

    def test_round_axis_mismatch(self, tmp_path):
        with pytest.raises(AggregateCsvError, match="round axis"):
            render(
                PlotSpec(
                    csv_paths=[RANDOM_CSV, SINGLE_CSV],
                    labels=["a", "b"],
                    out_path=str(tmp_path / "x.png"),
                )
            )

    def test_label_count_must_match(self, tmp_path):
        with pytest.raises(AggregateCsvError, match="label"):
            render(
                PlotSpec(
                    csv_paths=[RANDOM_CSV],
                    labels=["a", "b"],
                    out_path=str(tmp_path / "x.png"),
                )
            )

    def test_bad_kind_rejected(self, tmp_path):
        with pytest.raises(AggregateCsvError, match="kind"):
            render(two_series_spec(tmp_path / "x.png", kind="mean"))

    def test_render_is_deterministic(self, tmp_path):
        a = render(two_series_spec(tmp_path / "a.png"))
        b = render(two_series_spec(tmp_path / "b.png"))
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


class TestGolden:
    def test_byte_identical_to_committed_image(self, tmp_path):
        out = render(two_series_spec(tmp_path / "fig.png"))
        with open(out, "rb") as fresh, open(GOLDEN, "rb") as golden:
            assert fresh.read() == golden.read()


class TestCli:
    def test_flag_form(self, tmp_path, capsys):
        out = tmp_path / "cli.png"
        code = main(
            [
                "--csv", RANDOM_CSV, "--label", "random",
                "--csv", WEIGHTED_CSV, "--label", "weighted",
                "--kind", "pessimal", "--out", str(out),
            ]
        )
        assert code == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_spec_form(self, tmp_path, capsys):
        spec = tmp_path / "chart.toml"
        out = tmp_path / "fig.png"
        spec.write_text(
            f'csv = ["{RANDOM_CSV}", "{WEIGHTED_CSV}"]\n'
            f'labels = ["random", "weighted"]\n'
            f'out = "{out}"\n'
            'kind = "optimal"\n'
            'title = "comparison"\n'
        )
        assert main(["--spec", str(spec)]) == 0
        assert out.exists()

    def test_mixing_forms_rejected(self, tmp_path, capsys):
        assert main(["--spec", "x.toml", "--csv", RANDOM_CSV]) == 1

    def test_missing_input_exits_one(self, tmp_path, capsys):
        code = main(["--csv", "nope.csv", "--label", "x", "--out", str(tmp_path / "o.png")])
        assert code == 1
        assert "plot error" in capsys.readouterr().err

    def test_unknown_spec_key_exits_one(self, tmp_path, capsys):
        spec = tmp_path / "chart.toml"
        spec.write_text('bogus = 1\n')
        assert main(["--spec", str(spec)]) == 1


class TestFigureSettingAcceptance:
    """Secondary acceptance: one chart per figure setting from harness-shaped
    aggregate CSV pairs, each with two labeled series and std bands."""

    def _setting_pair(self, tmp_path, setting, seed):
        paths = []
        for alg, scale in (("ac-etgs-random", 1.0), ("ac-etgs-weighted", 0.85)):
            path = tmp_path / f"{setting}_aggregate_{alg}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(
                    ["algorithm", "local_round", "mean_optimal", "std_optimal",
                     "mean_pessimal", "std_pessimal"]
                )
                for r in range(20, 2001, 20):
                    m = scale * (seed + 30) * math.log(1 + r / 15)
                    w.writerow([alg, r, repr(m), repr(0.1 * m), repr(0.75 * m), repr(0.08 * m)])
            paths.append(str(path))
        return paths

    def test_one_png_per_setting(self, tmp_path):
        for i, setting in enumerate(("fig1", "fig2", "fig3")):
            a, b = self._setting_pair(tmp_path, setting, seed=i)
            out = tmp_path / f"{setting}.png"
            code = main(
                [
                    "--csv", a, "--label", "random exploration",
                    "--csv", b, "--label", "weighted exploration",
                    "--out", str(out), "--title", setting,
                ]
            )
            assert code == 0
            assert out.stat().st_size > 10_000
