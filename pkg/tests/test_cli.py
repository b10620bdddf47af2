import json

import pytest
from click.testing import CliRunner

from metricdeform.cli.main import EXIT_REGRESSION, EXIT_VALIDATION, cli
from metricdeform.space import load_document, read_space, write_space
from metricdeform.verify import ComparabilityReport

from conftest import line_space


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


@pytest.fixture
def grid_file(workdir, run):
    result = run("generate", "--family", "grid", "--n", 10, "-o", "grid.json")
    assert result.exit_code == 0, result.output
    return workdir / "grid.json"


@pytest.fixture
def cantor_file(workdir, run):
    result = run("generate", "-f", "cantor", "--depth", 3, "-o", "cantor.json")
    assert result.exit_code == 0, result.output
    return workdir / "cantor.json"


def read_json(path):
    return json.loads(path.read_text())


def test_version(run):
    result = run("--version")
    assert result.exit_code == 0
    assert result.output.startswith("v")


def test_generate_writes_a_space(grid_file):
    space = read_space(grid_file)
    assert space.n == 10
    assert space.unbounded


def test_generate_rejects_bad_parameters(workdir, run):
    result = run("generate", "-f", "grid", "--n", 1, "-o", "bad.json")
    assert result.exit_code == EXIT_VALIDATION
    assert not (workdir / "bad.json").exists()


def test_transform_embeds_the_transform_block(workdir, run, grid_file):
    result = run("transform", "sphericalize", "-i", grid_file, "-o", "sphere.json")
    assert result.exit_code == 0, result.output
    doc = load_document((workdir / "sphere.json").read_text())
    assert doc.transform["kind"] == "sphericalize"
    assert doc.transform["m0"] == 1.0
    assert doc.transform["ledger"]["c0"]["value"] > 0
    assert len(doc.transform["infinity_estimates"]["lower"]) == 10
    assert not doc.flags.unbounded


def test_transform_preconditions_exit_2(run, grid_file):
    assert run("transform", "flatten", "-i", grid_file).exit_code == EXIT_VALIDATION
    assert run("transform", "sphericalize", "-i", grid_file, "--m0", 0).exit_code == 2
    assert run("transform", "flatten", "-i", "missing.json").exit_code == EXIT_VALIDATION


def test_flatten_drops_the_base(workdir, run, cantor_file):
    result = run("transform", "flatten", "-i", cantor_file, "--no-ledger", "-o", "flat.json")
    assert result.exit_code == 0, result.output
    doc = load_document((workdir / "flat.json").read_text())
    assert len(doc.ids) == 7
    assert doc.transform["ledger"] is None


def test_energy(workdir, run, cantor_file):
    (workdir / "u.json").write_text(json.dumps([0, 0, 0, 0, 1, 1, 1, 1]))
    result = run("energy", "-i", cantor_file, "--values", "u.json", "-o", "energy.json")
    assert result.exit_code == 0, result.output
    report = read_json(workdir / "energy.json")
    assert report["energy"] > 0
    assert report["p"] == 2.0

    (workdir / "short.json").write_text("[1, 2]")
    assert run("energy", "-i", cantor_file, "--values", "short.json").exit_code == 2


def test_analyze(run, cantor_file):
    result = run("analyze", "-i", cantor_file)
    assert result.exit_code == 0, result.output
    assert "C_nu" in result.output
    assert "kappa" in result.output


def test_analyze_without_a_log_log_slope(workdir, run):
    write_space(line_space([0.0, 1.0]), workdir / "two.json")
    result = run("analyze", "-i", "two.json")
    assert result.exit_code == 0, result.output
    assert "n/a" in result.output


def test_malformed_inputs_exit_2(workdir, run, grid_file, cantor_file):
    (workdir / "broken.json").write_text("{not json")
    assert run("analyze", "-i", "broken.json").exit_code == EXIT_VALIDATION
    (workdir / "schema.json").write_text(json.dumps({"ids": [0, 1]}))
    assert run("analyze", "-i", "schema.json").exit_code == EXIT_VALIDATION
    assert run("energy", "-i", cantor_file, "--p", 0.5).exit_code == EXIT_VALIDATION

    (workdir / "base.json").write_text(json.dumps({"window": -1}))
    result = run("verify", "doubling", "-i", grid_file, "--baseline", "base.json", "-o", "r.json")
    assert result.exit_code == EXIT_VALIDATION


def test_internal_schema_failures_exit_1(monkeypatch, run, grid_file):
    def broken(*args, **kwargs):
        return ComparabilityReport(statement="broken", min_ratio=2.0, max_ratio=1.0)

    monkeypatch.setattr("metricdeform.cli.main.run_statements", broken)
    assert run("verify", "doubling", "-i", grid_file, "-o", "r.json").exit_code == 1


def test_verify_bounds_on_a_sphericalized_grid(workdir, run):
    assert run("generate", "-f", "grid", "--n", 64, "-o", "g64.json").exit_code == 0
    result = run("verify", "bounds", "-i", "g64.json", "--no-timestamp", "-o", "b.json")
    assert result.exit_code == 0, result.output
    names = [r["statement"] for r in read_json(workdir / "b.json")["reports"]]
    assert "infinity-distance-bounds" in names


def test_verify_writes_a_reproducible_report(workdir, run, grid_file):
    for name in ("a.json", "b.json"):
        result = run("verify", "doubling", "-i", grid_file, "--no-timestamp", "-o", name)
        assert result.exit_code == 0, result.output
    first = read_json(workdir / "a.json")
    assert first == read_json(workdir / "b.json")
    assert "timestamp" not in first
    assert [r["statement"] for r in first["reports"]] == ["doubling-preservation"]


def test_verify_baselines(workdir, run, grid_file):
    blessed = run("verify", "doubling", "-i", grid_file, "--bless", "base.json", "-o", "r.json")
    assert blessed.exit_code == 0, blessed.output
    assert run("verify", "doubling", "-i", grid_file, "--baseline", "base.json").exit_code == 0

    (workdir / "tight.json").write_text(
        json.dumps(
            {
                "window": 0.0,
                "statements": {"doubling-preservation": {"min_ratio": 100.0, "max_ratio": 100.0}},
            }
        )
    )
    result = run("verify", "doubling", "-i", grid_file, "--baseline", "tight.json", "-o", "t.json")
    assert result.exit_code == EXIT_REGRESSION


def test_verify_sigma_mismatch_is_a_precondition(run, grid_file):
    result = run("verify", "energy", "-i", grid_file, "--sigma", 2, "-o", "x.json")
    assert result.exit_code == EXIT_VALIDATION
    allowed = run(
        "verify", "energy", "-i", grid_file, "--sigma", 2, "--allow-sigma-mismatch", "-o", "y.json"
    )
    assert allowed.exit_code in (0, EXIT_REGRESSION)


def test_bad_config_exits_2(workdir, run, grid_file):
    (workdir / "bad.yaml").write_text("besov:\n  q: 1\n")
    result = run("verify", "doubling", "-i", grid_file, "-c", "bad.yaml")
    assert result.exit_code == EXIT_VALIDATION


def test_duality_auto_direction(workdir, run, cantor_file):
    result = run("duality", "-i", cantor_file, "-o", "dual.json")
    assert result.exit_code == 0, result.output
    report = read_json(workdir / "dual.json")
    assert report["params"]["direction"] == "flatten-then-sphere"
    assert report["reports"][0]["statement"] == "duality-flatten-then-sphere"


def test_product(workdir, run, grid_file):
    result = run("product", "-i", grid_file, "--exponent", 2, "-o", "product.json")
    assert result.exit_code == 0, result.output
    assert read_json(workdir / "product.json")["collapses"] is True


def test_sweep(workdir, run):
    result = run(
        "sweep",
        "-f",
        "grid",
        "--levels",
        "6,8",
        "-s",
        "doubling",
        "--threads",
        1,
        "--csv",
        "sweep.csv",
        "-o",
        "sweep.json",
    )
    assert result.exit_code == 0, result.output
    assert read_json(workdir / "sweep.json")["levels"] == [6, 8]
    lines = (workdir / "sweep.csv").read_text().splitlines()
    assert lines[0] == "family,depth,statement,min_ratio,max_ratio"
    assert len(lines) == 3


def test_sweep_rejects_bad_levels(run):
    assert run("sweep", "-f", "grid", "--levels", "six").exit_code == EXIT_VALIDATION


def test_sweep_with_coarsest_calibration(workdir, run):
    result = run(
        "sweep",
        "-f",
        "grid",
        "--levels",
        "8,12",
        "-s",
        "bounds",
        "--calibration",
        "coarsest",
        "--threads",
        1,
        "-o",
        "sweep.json",
    )
    assert result.exit_code == 0, result.output
    body = read_json(workdir / "sweep.json")
    assert body["calibration"] == "coarsest"
    assert body["constants"]["c0"] > 0


@pytest.mark.slow
def test_bless_baselines(workdir, run):
    result = run("bless-baselines", "--dir", "blessed", "--case", "grid")
    assert result.exit_code == 0, result.output
    assert (workdir / "blessed" / "grid.json").exists()
    assert run("generate", "-f", "grid", "--n", 64, "-o", "g64.json").exit_code == 0
    result = run(
        "verify", "all", "-i", "g64.json", "--baseline", "blessed/grid.json", "-o", "r.json"
    )
    assert result.exit_code == 0, result.output
