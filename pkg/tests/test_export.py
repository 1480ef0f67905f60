import csv
import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from magnoep import (
    SerializationError,
    SweepSpec,
    ThreeModeModel,
    Trajectory,
    TwoModeModel,
    classify_phase,
    run_sweep,
    spectrum,
    symmetry_class,
)
from magnoep.export import BranchScaling, EPHit, TimeScaling, export

G1 = 0.1


def read_csv(path):
    text = path.read_bytes().decode()
    comments = [ln[2:] for ln in text.splitlines() if ln.startswith("# ")]
    rows = list(csv.reader(ln for ln in text.splitlines() if not ln.startswith("#")))
    return text, comments, rows[0], rows[1:]


@pytest.fixture(scope="module")
def pt_sweep():
    return run_sweep(SweepSpec(TwoModeModel(1.0, G1, -G1, 0.0), "j", tuple(np.linspace(0, 2, 41) * G1)))


class TestBranchSet:
    def test_single_point_has_one_row(self, tmp_path):
        r = run_sweep(SweepSpec(TwoModeModel(1.0, G1, -G1, 0.0), "j", (0.5 * G1,)))
        _, _, header, rows = read_csv(export(r, "csv", tmp_path / "one.csv"))
        assert header == ["j", "re_0", "im_0", "re_1", "im_1", "phase", "coalescence"]
        assert len(rows) == 1 and rows[0][5] == "Broken"

    def test_csv_values_round_trip(self, tmp_path, pt_sweep):
        text, comments, header, rows = read_csv(export(pt_sweep, "csv", tmp_path / "pt.csv"))
        assert "\r" not in text
        assert np.array_equal([float(r[0]) for r in rows], pt_sweep.param_values)
        for b in range(2):
            col = header.index(f"re_{b}")
            assert np.array_equal([float(r[col]) for r in rows], pt_sweep.values(b).real)
            assert np.array_equal([float(r[col + 1]) for r in rows], pt_sweep.values(b).imag)
        assert [c for c in comments if c.startswith("ep_hit")] == ["ep_hit: j=0.10000000000000001 order=2"]

    def test_json_round_trip(self, tmp_path, pt_sweep):
        obj = json.loads(export(pt_sweep, "json", tmp_path / "pt.json").read_text())
        assert obj["schema_version"] == 1 and obj["kind"] == "branch_set"
        assert obj["param_values"] == list(pt_sweep.param_values)
        for b, br in enumerate(obj["branches"]):
            assert np.array_equal(br["re"], pt_sweep.values(b).real)
            assert np.array_equal(br["im"], pt_sweep.values(b).imag)
        assert obj["ep_hits"] == [{"param": G1, "normalized": G1, "order": 2}]
        assert obj["phase_labels"][obj["param_values"].index(G1)] == "AtEP"

    def test_scaling(self, tmp_path, pt_sweep):
        s = BranchScaling(param_label="j_over_gamma1", param_scale=G1, scale=1.0,
                          re_label="freq", im_label="linewidth", linewidth=True)
        _, comments, header, rows = read_csv(export(pt_sweep, "csv", tmp_path / "s.csv", s))
        assert header[:3] == ["j_over_gamma1", "freq_0", "linewidth_0"]
        assert float(rows[0][2]) == pytest.approx(-pt_sweep.values(0)[0].imag)
        assert float(rows[-1][0]) == pytest.approx(2.0)
        assert "ep_hit: j_over_gamma1=1 order=2" in comments

    def test_branch_ties_flagged(self, tmp_path):
        # equal carriers and no loss: J = 0 is a Hermitian crossing with tied assignments
        m = ThreeModeModel(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0)
        r = run_sweep(SweepSpec(m, "j", (0.0, 0.1, 0.2)))
        assert r.ambiguous_points
        _, comments, _, _ = read_csv(export(r, "csv", tmp_path / "a.csv"))
        flagged = [c for c in comments if c.startswith("branch_ambiguity_rows")]
        assert flagged == ["branch_ambiguity_rows: " + " ".join(map(str, r.ambiguous_points))]
        obj = json.loads(export(r, "json", tmp_path / "a.json").read_text())
        assert obj["ambiguous_points"] == list(r.ambiguous_points)

    def test_unclassified_point_written_as_ambiguous(self, tmp_path, pt_sweep):
        labels = list(pt_sweep.phase_labels)
        labels[3] = None
        r = replace(pt_sweep, phase_labels=tuple(labels))
        _, _, _, rows = read_csv(export(r, "csv", tmp_path / "u.csv"))
        assert rows[3][-2:] == ["Ambiguous", ""]
        assert json.loads(export(r, "json", tmp_path / "u.json").read_text())["phase_labels"][3] == "Ambiguous"

    @pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
    def test_non_finite_rejected(self, tmp_path, pt_sweep):
        branches = list(pt_sweep.branches)
        branches[0] = (replace(branches[0][0], frequency=math.inf),) + branches[0][1:]
        r = replace(pt_sweep, branches=tuple(branches))
        for fmt in ("csv", "json"):
            with pytest.raises(SerializationError):
                export(r, fmt, tmp_path / f"x.{fmt}")


class TestTrajectory:
    def test_three_samples(self, tmp_path):
        tr = Trajectory(np.array([0.0, 0.5, 1.0]), np.arange(12.0).reshape(3, 4), ("q1", "p1", "q2", "p2"))
        text, comments, header, rows = read_csv(export(tr, "csv", tmp_path / "t.csv"))
        assert header == ["t", "q1", "p1", "q2", "p2"] and len(rows) == 3
        assert "truncated: false" in comments
        assert text.endswith("\n") and "\r\n" not in text

    def test_truncated_flag(self, tmp_path):
        tr = Trajectory(np.array([0.0, 1.0]), np.ones((2, 2)), ("q1", "p1"), truncated=True)
        assert json.loads(export(tr, "json", tmp_path / "t.json").read_text())["truncated"] is True
        assert "truncated: true" in read_csv(export(tr, "csv", tmp_path / "t.csv"))[1]

    def test_nan_raises(self, tmp_path):
        tr = Trajectory(np.array([0.0, 1.0]), np.array([[1.0, 0.0], [math.nan, 0.0]]), ("q1", "p1"))
        for fmt in ("csv", "json"):
            with pytest.raises(SerializationError):
                export(tr, fmt, tmp_path / f"t.{fmt}")

    def test_column_selection_and_time_scale(self, tmp_path):
        tr = Trajectory(np.array([0.0, 2 * math.pi]), np.ones((2, 4)), ("q1", "p1", "q2", "p2"))
        s = TimeScaling(time_label="t_periods", time_scale=1 / (2 * math.pi), units="periods", columns=("q2",))
        _, _, header, rows = read_csv(export(tr, "csv", tmp_path / "t.csv", s))
        assert header == ["t_periods", "q2"] and float(rows[1][0]) == 1.0

    @settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(hnp.arrays(np.float64, st.tuples(st.integers(1, 20), st.just(2)),
                      elements=st.floats(allow_nan=False, allow_infinity=False)))
    def test_bit_identical_round_trip(self, tmp_path, states):
        tr = Trajectory(np.arange(len(states), dtype=float) * 0.1, states, ("q1", "p1"))
        obj = json.loads(export(tr, "json", tmp_path / "r.json").read_text())
        assert np.array_equal(obj["states"]["q1"], states[:, 0])
        assert np.array_equal(obj["times"], tr.times)
        _, _, _, rows = read_csv(export(tr, "csv", tmp_path / "r.csv"))
        assert np.array_equal(np.array(rows, dtype=float)[:, 1:], states)


class TestScalars:
    def test_phase_report(self, tmp_path):
        m = TwoModeModel(1.0, G1, -G1, G1)
        rep = classify_phase(spectrum(m), symmetry_class(m))
        obj = json.loads(export(rep, "json", tmp_path / "p.json").read_text())
        assert obj["kind"] == "phase_report" and obj["label"] == "AtEP" and obj["ep_order"] == 2
        _, _, header, rows = read_csv(export(rep, "csv", tmp_path / "p.csv"))
        assert header == ["symmetry", "label", "ep_order", "coalescence"] and rows[0][1] == "AtEP"

    def test_ep_hit(self, tmp_path):
        hit = EPHit("j", 0.16924880410, 2, 1.6924880410)
        obj = json.loads(export(hit, "json", tmp_path / "e.json").read_text())
        assert obj["param_value"] == 0.16924880410 and obj["ep_order"] == 2
        _, _, _, rows = read_csv(export(hit, "csv", tmp_path / "e.csv"))
        assert float(rows[0][2]) == 1.6924880410

    def test_unknown_format_and_type(self, tmp_path):
        with pytest.raises(ValueError):
            export(EPHit("j", 1.0, 2), "xml", tmp_path / "e.xml")
        with pytest.raises(TypeError):
            export(object(), "csv", tmp_path / "o.csv")
