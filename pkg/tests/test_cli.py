import csv
import io
import json

import pytest

import lib
from germlab import __version__
from germlab.cli import Report, main, run_command
from germlab.multiplicity import AtLeast, Finite
from germlab.scenario import parse_scenario


def scenario(document):
    return parse_scenario(json.dumps(document))


def rows(document):
    """CSV rows of a report, without comment lines."""
    lines = [ln for ln in document.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def notes(document):
    return [ln[2:] for ln in document.splitlines() if ln.startswith("# ")]


DOUBLING_SEQ = {
    "word": "F^n",
    "range": "0..3",
    "pull": "Y",
    "against": "X",
}


class TestReport:
    def setup_class(self):
        self.report = Report("mu-seq", 40, "n")
        self.report.add(0, Finite(1, certificate_order=2))
        self.report.add(1, AtLeast(40))
        self.report.fail(2, ValueError("failed\nsecond line"))

    def test_csv(self):
        assert self.report.render() == (
            "n,mu,certificate_order\n"
            "0,1,2\n"
            "1,>=40,\n"
            "# n=2: failed\n"
            "# second line\n"
        )

    def test_json(self):
        document = json.loads(self.report.render("json"))
        assert document == {
            "command": "mu-seq",
            "cap": 40,
            "results": [
                {"key": 0, "mu": 1, "certificate_order": 2},
                {"key": 1, "mu": ">=40", "certificate_order": None},
            ],
            "notes": ["n=2: failed\nsecond line"],
        }


class TestMultiplicityCommands:
    def setup_class(self):
        self.doubling = scenario(lib.scenario_document())
        self.shear = scenario(lib.shear_document())

    def test_mu_seq(self):
        outcome = run_command(self.doubling, "mu-seq", DOUBLING_SEQ)
        assert outcome.exit_code == 0 and outcome.errors == ()
        table = rows(outcome.document)
        assert table[0] == ["n", "mu", "certificate_order"]
        assert [row[:2] for row in table[1:]] == [
            ["0", "1"],
            ["1", "2"],
            ["2", "4"],
            ["3", "8"],
        ]
        assert "max finite: 8" in notes(outcome.document)

    def test_csv_and_json_agree(self):
        flags = dict(DOUBLING_SEQ, format="json")
        document = json.loads(
            run_command(self.doubling, "mu-seq", flags).document
        )
        assert document["command"] == "mu-seq" and document["cap"] == 40
        csv_outcome = run_command(self.doubling, "mu-seq", DOUBLING_SEQ)
        table = rows(csv_outcome.document)
        assert [
            [str(r["key"]), str(r["mu"]), str(r["certificate_order"])]
            for r in document["results"]
        ] == table[1:]

    def test_workers_do_not_change_output(self):
        serial = run_command(self.doubling, "mu-seq", DOUBLING_SEQ)
        threaded = run_command(
            self.doubling, "mu-seq", dict(DOUBLING_SEQ, workers=3)
        )
        assert serial.document == threaded.document

    def test_cap_flag(self):
        flags = dict(DOUBLING_SEQ, cap=6, format="json")
        document = json.loads(
            run_command(self.doubling, "mu-seq", flags).document
        )
        assert document["cap"] == 6
        assert [r["mu"] for r in document["results"]] == [1, 2, 4, ">=6"]

    def test_partial_failure(self):
        flags = dict(DOUBLING_SEQ, range="-1..1")
        outcome = run_command(self.doubling, "mu-seq", flags)
        assert outcome.exit_code == 1
        assert [row[:2] for row in rows(outcome.document)[1:]] == [
            ["0", "1"],
            ["1", "2"],
        ]
        (error,) = outcome.errors
        assert error.startswith("germlab mu-seq: error: n=-1:")
        assert "not invertible" in error

    def test_partial_failure_json(self):
        flags = dict(DOUBLING_SEQ, range="-1..1", format="json")
        document = json.loads(
            run_command(self.doubling, "mu-seq", flags).document
        )
        assert [r["key"] for r in document["results"]] == [0, 1]
        assert all(r["mu"] is not None for r in document["results"])
        assert document["notes"][0].startswith("n=-1: ")

    def test_shear(self):
        flags = {"word": "F^n", "range": "-5..5", "pull": "X", "against": "Y"}
        outcome = run_command(self.shear, "mu-seq", flags)
        mus = [row[1] for row in rows(outcome.document)[1:]]
        assert mus == ["2"] * 5 + [">=12"] + ["2"] * 5
        assert "presumed infinite at n = 0" in notes(outcome.document)

    def test_mu(self):
        flags = {"word": "F^4", "pull": "Y", "against": "X"}
        outcome = run_command(self.doubling, "mu", flags)
        assert rows(outcome.document)[1][:2] == ["F^4", "16"]

    def test_codim(self):
        lines = scenario(
            lib.scenario_document(varieties={"X": ["x"], "Y": ["y"]})
        )
        outcome = run_command(lines, "codim", {"ideal": "X+Y"})
        assert outcome.exit_code == 0
        assert rows(outcome.document)[1][:2] == ["X+Y", "1"]
        single = run_command(lines, "codim", {"ideal": "X"})
        assert rows(single.document)[1][:2] == ["X", ">=40"]

    def test_fixed_points(self):
        document = {
            "dimension": 1,
            "variables": ["x"],
            "maps": {"f": ["x + x^2"]},
        }
        flags = {"word": "f^n", "range": "1..4", "cap": 10}
        outcome = run_command(scenario(document), "fixed-points", flags)
        assert [row[1] for row in rows(outcome.document)[1:]] == ["2"] * 4
        flags = {"word": "f"}
        outcome = run_command(scenario(document), "fixed-points", flags)
        assert rows(outcome.document)[1][:2] == ["f", "2"]

    def test_generic_mu(self):
        outcome = run_command(
            self.shear, "generic-mu", {"pull": "X", "against": "Y"}
        )
        assert outcome.exit_code == 0
        assert rows(outcome.document)[1][:2] == ["generic", "2"]
        assert "time variables: t" in notes(outcome.document)

    def test_generic_mu_with_samples(self):
        flags = {"pull": "X", "against": "Y", "range": "-2..2"}
        outcome = run_command(self.shear, "generic-mu", flags)
        table = rows(outcome.document)
        assert [row[:2] for row in table[1:]] == [
            ["generic", "2"],
            ["t=-2", "2"],
            ["t=-1", "2"],
            ["t=0", ">=12"],
            ["t=1", "2"],
            ["t=2", "2"],
        ]
        assert notes(outcome.document)[:3] == [
            "consistent: yes",
            "max finite: 2",
            "exceptional sample: t=0",
        ]

    def test_exceptional(self):
        flags = {"pull": "X", "against": "Y"}
        outcome = run_command(self.shear, "exceptional", flags)
        assert outcome.exit_code == 0
        found = notes(outcome.document)
        assert found[0] == "order: 3"
        assert any(note.startswith("condition: ") for note in found)


class TestDisplayCommands:
    def test_commute_failure_is_a_verdict(self):
        document = lib.scenario_document(
            maps={"F": ["2*x", "1/2*y"]}, fields={"v": ["0", "x"]}
        )
        outcome = run_command(scenario(document), "commute")
        assert outcome.exit_code == 0
        assert notes(outcome.document) == [
            "order: 3",
            "(3) F,v: fail",
            "verdict: fail",
        ]

    def test_commute_pass(self):
        document = lib.shear_document(fields={"v": ["y^2", "0"]})
        outcome = run_command(scenario(document), "commute", {"order": 4})
        assert notes(outcome.document)[-1] == "verdict: pass"

    def test_bracket(self):
        document = lib.scenario_document(
            fields={"v": ["x", "0"], "w": ["0", "x^2"]}
        )
        outcome = run_command(scenario(document), "bracket")
        assert notes(outcome.document) == ["[v,w] = (0, 2*x^2)"]

    def test_bracket_needs_two_fields(self):
        outcome = run_command(scenario(lib.scenario_document()), "bracket")
        assert outcome.exit_code == 2
        assert "at least two fields" in outcome.errors[0]

    def test_flow(self):
        document = lib.shear_document(fields={"v": ["0", "x"]})
        outcome = run_command(scenario(document), "flow", {"time": "3/2"})
        assert notes(outcome.document) == ["exp(3/2 v) = (x, 3/2*x + y)"]
        outcome = run_command(scenario(document), "flow")
        assert notes(outcome.document)[0].startswith("exp(t v) = (x, ")

    def test_flow_of_word(self):
        document = lib.shear_document(fields={"v": ["0", "x"]})
        outcome = run_command(scenario(document), "flow", {"word": "F^2"})
        assert notes(outcome.document) == ["F^2 = (x + 2*y^2, y)"]

    def test_flow_non_triangular(self):
        document = lib.shear_document(fields={"v": ["y", "0"]})
        outcome = run_command(scenario(document), "flow")
        assert outcome.exit_code == 1
        assert "of v" in outcome.errors[0]

    def test_qp(self):
        document = lib.scenario_document(maps={"F": ["2*x", "1/2*y + x^2"]})
        outcome = run_command(scenario(document), "qp", {"order": 2})
        found = notes(outcome.document)
        assert outcome.exit_code == 0
        assert [note.split(" -> ")[0] for note in found[:2]] == [
            "F: x",
            "F: y",
        ]
        assert found[-1].startswith("spectrum: ")
        pulled = run_command(scenario(document), "qp", {"pull": "Y"})
        assert notes(pulled.document)[0].startswith("Y[1] -> ")

    def test_qp_non_triangular(self):
        document = lib.scenario_document(maps={"F": ["y", "x"]})
        outcome = run_command(scenario(document), "qp")
        assert outcome.exit_code == 1


class TestQueries:
    def test_batch(self):
        queries = {
            "doubling": dict(DOUBLING_SEQ, command="mu-seq"),
            "point": {"command": "codim", "ideal": "X+Y"},
        }
        document = lib.scenario_document(queries=queries)
        outcome = run_command(scenario(document), "queries")
        assert outcome.exit_code == 0
        parsed = scenario(document)
        expected = (
            run_command(parsed, "mu-seq", DOUBLING_SEQ).document
            + run_command(parsed, "codim", {"ideal": "X+Y"}).document
        )
        assert outcome.document == expected

    def test_against_list(self):
        query = dict(DOUBLING_SEQ, command="mu-seq", against=["X"])
        document = lib.scenario_document(queries={"q": query})
        outcome = run_command(scenario(document), "queries")
        assert [row[1] for row in rows(outcome.document)[1:]] == [
            "1",
            "2",
            "4",
            "8",
        ]

    def test_no_recursion(self):
        document = lib.scenario_document(
            queries={"loop": {"command": "queries"}}
        )
        outcome = run_command(scenario(document), "queries")
        assert outcome.exit_code == 2
        assert outcome.errors == (
            "germlab queries: error: query loop: recursion",
        )


class TestInputErrors:
    def setup_class(self):
        self.doubling = scenario(lib.scenario_document())

    @pytest.mark.parametrize(
        "command,flags,message",
        [
            ("nope", {}, "unknown command 'nope'"),
            ("mu-seq", dict(DOUBLING_SEQ, range="3..1"), "empty range"),
            ("mu-seq", dict(DOUBLING_SEQ, pull="Z"), 'variety "Z"'),
            ("mu-seq", dict(DOUBLING_SEQ, word="G^n"), 'map "G"'),
            ("mu-seq", dict(DOUBLING_SEQ, cap=0), "--cap: must be positive"),
            ("mu", {"word": "F"}, "--pull: required option missing"),
            ("codim", {"ideal": "X", "time": "1"}, "--time: unrecognized"),
            ("flow", {"order": 0}, "--order: must be positive"),
        ],
    )
    def test_exit_code_two(self, command, flags, message):
        outcome = run_command(self.doubling, command, flags)
        assert outcome.exit_code == 2 and outcome.document == ""
        (error,) = outcome.errors
        assert message in error

    def test_not_invertible_is_mathematical(self):
        outcome = run_command(
            self.doubling, "generic-mu", {"pull": "Y", "against": "X"}
        )
        assert outcome.exit_code == 1
        assert outcome.errors[0].startswith("germlab generic-mu: error: ")

    def test_sampling_needs_generators(self):
        empty = scenario(lib.scenario_document(maps={}))
        outcome = run_command(
            empty, "generic-mu", {"pull": "Y", "range": "0..2"}
        )
        assert outcome.exit_code == 2
        assert "at least one map or field" in outcome.errors[0]

    def test_internal_value_error_is_not_bad_input(self, monkeypatch):
        def broken(ideal, cap):
            raise ValueError("internal")

        monkeypatch.setattr("germlab.cli.codim_of", broken)
        with pytest.raises(ValueError, match="internal"):
            run_command(self.doubling, "codim", {"ideal": "X"})


class TestMain:
    def test_mu_seq(self, tmp_path, capfd):
        path = lib.write_scenario(tmp_path, lib.scenario_document())
        code = main(
            [
                "germlab",
                "mu-seq",
                "--scenario",
                path,
                "--word",
                "F^n",
                "--range",
                "0..4",
                "--pull",
                "Y",
                "--against",
                "X",
            ]
        )
        out, err = capfd.readouterr()
        assert code == 0 and err == ""
        assert [row[1] for row in rows(out)[1:]] == ["1", "2", "4", "8", "16"]

    def test_root_options_first(self, tmp_path, capfd):
        path = lib.write_scenario(tmp_path, lib.scenario_document())
        code = main(
            [
                "germlab",
                "--scenario",
                path,
                "--format=json",
                "--cap",
                "8",
                "codim",
                "--ideal",
                "X+Y",
            ]
        )
        out, _ = capfd.readouterr()
        assert code == 0
        document = json.loads(out)
        assert document["cap"] == 8
        assert document["results"][0]["mu"] == 1

    def test_help(self, capfd):
        assert main(["germlab", "--help"]) == 0
        out, _ = capfd.readouterr()
        assert out.startswith("Usage: germlab <command>")
        assert "mu-seq" in out and "generic-mu" in out

    def test_command_help(self, capfd):
        assert main(["germlab", "mu-seq", "-h"]) == 0
        out, _ = capfd.readouterr()
        assert out.startswith("Usage: germlab mu-seq --word WORD --range A..B")
        assert "Fixed varieties, separated by commas." in out

    def test_version(self, capfd):
        assert main(["germlab", "--version"]) == 0
        out, _ = capfd.readouterr()
        assert out == f"germlab version {__version__}\n"

    def test_no_command(self, capfd):
        assert main(["germlab"]) == 2
        _, err = capfd.readouterr()
        assert err.startswith("Usage: germlab")

    def test_missing_scenario(self, capfd):
        assert main(["germlab", "codim", "--ideal", "X"]) == 2
        _, err = capfd.readouterr()
        assert err == (
            "germlab codim: error: --scenario: required option missing\n"
        )

    def test_bad_option(self, capfd):
        assert main(["germlab", "codim", "--ideal"]) == 2
        _, err = capfd.readouterr()
        assert err == "germlab: error: --ideal: option requires a value\n"

    def test_invalid_scenario(self, tmp_path, capfd):
        document = lib.scenario_document(maps={"F": ["x + 1", "y"]})
        path = lib.write_scenario(tmp_path, document)
        code = main(["germlab", "codim", "--scenario", path, "--ideal", "X"])
        _, err = capfd.readouterr()
        assert code == 2
        assert "map F: component 1 has constant term" in err

    def test_mathematical_failure(self, tmp_path, capfd):
        path = lib.write_scenario(tmp_path, lib.scenario_document())
        code = main(
            [
                "germlab",
                "mu",
                "--scenario",
                path,
                "--word",
                "F^-1",
                "--pull",
                "Y",
            ]
        )
        out, err = capfd.readouterr()
        assert code == 1 and out == ""
        assert err.startswith("germlab mu: error: ")
