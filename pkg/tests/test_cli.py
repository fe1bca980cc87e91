import json

import pytest

import main
from dblcat_fibrations.config import Settings
from dblcat_fibrations.constants import EXIT_IO_ERROR, EXIT_MATH_FAILURE, EXIT_OK, EXIT_RESOURCE_CAP
from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import transposition, un_example
from dblcat_fibrations.dblcat import grid, to_terminal_double
from dblcat_fibrations.serialization import load_instance, make_instance, save_instance
from dblcat_fibrations.workbench import FibrationWorkbench


@pytest.fixture
def instances(tmp_path):
    """Instance files for a fibration, a non-fibration, a double category and a functor into Cat"""
    values = {
        "fibration": transposition(chain(1)),
        "terminal": to_terminal_double(grid(1, 1)),
        "grid": grid(1, 1),
        "un": un_example(),
    }
    return {name: str(save_instance(make_instance(name, value), tmp_path / f"{name}.json"))
            for name, value in values.items()}


@pytest.fixture
def workbench():
    return FibrationWorkbench(Settings())


class TestWorkbench:
    def test_validate(self, workbench, instances):
        code, report = workbench.run("validate", path=instances["grid"])
        assert code == EXIT_OK
        assert report['ok'] and report['validation']['ok']

    def test_fibcheck(self, workbench, instances):
        assert workbench.run("fibcheck", path=instances["fibration"])[0] == EXIT_OK
        code, report = workbench.run("fibcheck", path=instances["terminal"], kind="left-cart")
        assert code == EXIT_MATH_FAILURE
        assert report['certificate']['holds'] is False

    def test_wrong_kind_of_instance(self, workbench, instances):
        code, report = workbench.run("fibcheck", path=instances["grid"])
        assert code == EXIT_IO_ERROR
        assert "expected" in report['error']

    def test_missing_file(self, workbench, tmp_path):
        code, _ = workbench.run("validate", path=str(tmp_path / "absent.json"))
        assert code == EXIT_IO_ERROR

    def test_reflect(self, workbench, instances, tmp_path):
        out = tmp_path / "perp.json"
        code, report = workbench.run("reflect", path=instances["fibration"], out=str(out))
        assert code == EXIT_OK
        assert report['reflection']['variant'] == "perp"
        assert load_instance(out).kind == "double-functor"

    def test_reflect_non_fibration(self, workbench, instances):
        code, report = workbench.run("reflect", path=instances["terminal"])
        assert code == EXIT_MATH_FAILURE
        assert report['error_type'] == "NotCertifiedError"
        assert report['witness']

    def test_roundtrip(self, workbench, instances):
        code, report = workbench.run("roundtrip", path=instances["fibration"])
        assert code == EXIT_OK
        assert report['roundtrip']['status'] == "isomorphism"

    def test_unstraighten_then_straighten(self, workbench, instances, tmp_path):
        code, report = workbench.run("unstraighten", path=instances["un"], out=str(tmp_path / "out") + "/")
        assert code == EXIT_OK
        assert (report['objects'], report['morphisms'], report['split']) == (3, 6, True)
        code, report = workbench.run("straighten", path=report['out'])
        assert code == EXIT_OK
        assert report['values'] == 2

    def test_bad_level(self, workbench, instances):
        with pytest.raises(ValueError):
            workbench.run("unstraighten", path=instances["un"], level=3)

    def test_compare_psi(self, workbench, instances):
        code, report = workbench.run("compare-psi", path=instances["fibration"], kernels=("K",), window=(1, 1))
        assert code == EXIT_OK
        assert report['comparison']['ok']

    def test_cap(self, instances):
        workbench = FibrationWorkbench(Settings(max_cells=1))
        code, report = workbench.run("compare-psi", path=instances["fibration"], kernels=("K",), window=(0, 0))
        assert code == EXIT_RESOURCE_CAP
        assert report['limit'] == 1

    def test_export_dot(self, workbench, instances, tmp_path):
        code, report = workbench.run("export-dot", path=instances["grid"], out=str(tmp_path / "g.dot"))
        assert code == EXIT_OK
        assert report['files'] == [str(tmp_path / "g.dot")]

    def test_unknown_command(self, workbench):
        with pytest.raises(ValueError):
            workbench.run("prove")

    def test_batch(self, workbench, instances, tmp_path):
        code, report = workbench.run_batch("validate", [instances["grid"], str(tmp_path / "absent.json")])
        assert code == EXIT_IO_ERROR
        assert [r['instance'] for r in report['results']] == ["absent", "grid"]
        assert [r['exit_code'] for r in report['results']] == [EXIT_IO_ERROR, EXIT_OK]

    def test_gen(self, workbench, tmp_path):
        code, report = workbench.run("gen", seed=4, out=str(tmp_path / "corpus"), size=2, base_objects=2)
        assert code == EXIT_OK
        assert report['entries'] == report['certified']
        assert (tmp_path / "corpus" / "manifest.json").exists()

    def test_internal_error_has_an_exit_code(self, workbench, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise KeyError("cell")
        monkeypatch.setattr("dblcat_fibrations.workbench.generate_corpus", broken)
        code, report = workbench.run("gen", seed=0, out=str(tmp_path / "corpus"), size=1)
        assert code == EXIT_MATH_FAILURE
        assert report['error_type'] == "KeyError"
        assert report['internal'] is True


class TestMain:
    def test_no_command(self):
        assert main.main([]) == EXIT_IO_ERROR

    def test_info(self, capsys):
        assert main.main(["--info"]) == EXIT_OK
        info = json.loads(capsys.readouterr().out)
        assert info['settings']['mode'] == "iso"
        assert "perp" in info['reflections']

    def test_create_env(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main.main(["--create-env"]) == EXIT_OK
        assert "DBLCAT_MODE=iso" in (tmp_path / ".env").read_text(encoding="utf-8")

    def test_validate(self, instances, capsys):
        assert main.main(["validate", instances["grid"], instances["fibration"]]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert len(report['results']) == 2

    def test_fibcheck_failure(self, instances):
        assert main.main(["fibcheck", instances["terminal"], "--kind", "left-cart"]) == EXIT_MATH_FAILURE

    def test_cap_flag(self, instances):
        argv = ["compare-psi", instances["fibration"], "--kernels", "K", "--window", "0", "0", "--max-cells", "1"]
        assert main.main(argv) == EXIT_RESOURCE_CAP

    def test_gen(self, tmp_path, capsys):
        argv = ["gen", "--seed", "2", "--size", "1", "--base-objects", "2", "--out", str(tmp_path)]
        assert main.main(argv) == EXIT_OK
        assert json.loads(capsys.readouterr().out)['entries'] == 1

    def test_gen_with_every_recipe(self, tmp_path, capsys):
        argv = ["gen", "--seed", "0", "--size", "4", "--base-objects", "3", "--out", str(tmp_path)]
        assert main.main(argv) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report['entries'] == report['certified'] == 4
