import json

import pytest
from openpyxl import load_workbook

import ui
from config import BUNDLED_CONSTRUCTIONS, CONSTRUCTIONS_DIR, NO_COLOR_ENV, SHEET_NAMES
from main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main

MAIN_SCRIPT = str(CONSTRUCTIONS_DIR / BUNDLED_CONSTRUCTIONS["main"])
NODAL_SCRIPT = CONSTRUCTIONS_DIR / BUNDLED_CONSTRUCTIONS["nodal"]


def test_chain_command(capsys):
    assert main(["chain", "15", "7"]) == EXIT_OK
    assert capsys.readouterr().out == "[3,2,2,2,2,2,10,2]  lens order 225\n"
    assert main(["chain", "2", "1"]) == EXIT_OK
    assert capsys.readouterr().out == "[4]  lens order 4\n"


def test_chain_command_rejects_bad_params(capsys):
    assert main(["chain", "6", "4"]) == EXIT_USAGE
    assert "❌" in capsys.readouterr().err


def test_tclass_command(capsys):
    assert main(["tclass", "4"]) == EXIT_OK
    assert capsys.readouterr().out == "class T; (d,n,a)=(1,2,1); C(2,1)\n"
    assert main(["tclass", "2", "2"]) == EXIT_OK
    assert capsys.readouterr().out == "not class T（rational double point）\n"
    assert main(["tclass", "3"]) == EXIT_OK
    assert capsys.readouterr().out == "not class T\n"


def test_enum_t_command(capsys):
    assert main(["enum-t", "--max-len", "2", "--max-b", "5"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["[2,5]", "[3,3]  j0", "[4]", "[5,2]"]


def test_verify_bundled(capsys):
    assert main(["verify", MAIN_SCRIPT]) == EXIT_OK
    captured = capsys.readouterr()
    assert "=== 链 ===" in captured.out
    assert "✅" in captured.err


def test_verify_quiet_prints_no_report(capsys):
    assert main(["verify", "--quiet", MAIN_SCRIPT]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_verify_bad_script(tmp_path, capsys):
    bad = tmp_path / "bad.rbd"
    bad.write_text("surface p2\nexplode x\n", encoding="utf-8")
    assert main(["verify", str(bad)]) == EXIT_USAGE
    assert "第 2 行" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.rbd")]) == EXIT_USAGE


def test_verify_non_utf8_script(tmp_path, capsys):
    bad = tmp_path / "bad.rbd"
    bad.write_bytes(b"\xff\xfe")
    assert main(["verify", "--quiet", str(bad), str(NODAL_SCRIPT)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "第 1 行第 1 列" in err
    # 后面的文件照常验证
    assert f"{NODAL_SCRIPT} 全部检查通过" in err


def test_verify_failed_expectation(tmp_path):
    script = tmp_path / "nodal.rbd"
    text = NODAL_SCRIPT.read_text(encoding="utf-8")
    script.write_text(text.replace("expect ksq_x = 0", "expect ksq_x = 1"), encoding="utf-8")
    assert main(["verify", "--quiet", str(script)]) == EXIT_FAILED
    # 一个失败不影响其余文件，退出码取最坏
    assert main(["verify", "--quiet", str(NODAL_SCRIPT), str(script)]) == EXIT_FAILED


def test_verify_json_stdout(capsys):
    assert main(["verify", "--json", "-", MAIN_SCRIPT]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["passed"] is True
    assert data["contraction"]["ksq_x"] == "2"
    assert [c["name"] for c in data["chains"]] == ["G", "H", "I", "Bt", "J"]


def test_verify_json_file(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--quiet", "--json", str(out), str(NODAL_SCRIPT)]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["contraction"]["discrepancies"] == {"C": ["1/2"]}


def test_verify_xlsx(tmp_path):
    out = tmp_path / "report.xlsx"
    assert main(["verify", "--quiet", "--xlsx", str(out), str(NODAL_SCRIPT)]) == EXIT_OK
    wb = load_workbook(out)
    assert wb.sheetnames[0] == SHEET_NAMES["summary"]
    assert SHEET_NAMES["nef"] in wb.sheetnames
    # 没有 connects，π1 表为空，不写
    assert SHEET_NAMES["pi1"] not in wb.sheetnames
    nef = wb[SHEET_NAMES["nef"]]
    assert nef["A1"].font.bold
    # e1 的值为 −1/2，整行标红
    red_rows = [row[0].row for row in nef.iter_rows(min_row=2) if row[0].fill.fill_type == "solid"]
    assert len(red_rows) >= 1


def test_verify_xlsx_several_reports(tmp_path):
    out = tmp_path / "both.xlsx"
    enriques = str(CONSTRUCTIONS_DIR / BUNDLED_CONSTRUCTIONS["enriques"])
    assert main(["verify", "--quiet", "--xlsx", str(out), str(NODAL_SCRIPT), enriques]) == EXIT_OK
    names = load_workbook(out).sheetnames
    assert "1-" + SHEET_NAMES["summary"] in names
    assert "2-" + SHEET_NAMES["summary"] in names


class FakeTty:
    def isatty(self):
        return True


def test_no_color_env(monkeypatch):
    monkeypatch.delenv(NO_COLOR_ENV, raising=False)
    assert ui.use_color(FakeTty())
    monkeypatch.setenv(NO_COLOR_ENV, "1")
    assert not ui.use_color(FakeTty())


def test_strip_icon():
    assert ui.strip_icon("❌ 第 3 行：坏了") == "第 3 行：坏了"
    assert ui.strip_icon("plain") == "plain"


def test_missing_subcommand():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
