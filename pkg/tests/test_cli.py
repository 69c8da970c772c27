import json

from mlogic.cli import run

BARBARA = ("all P. all Q. all R. ((all x. (~P(x) | Q(x))) & (all x. (~Q(x) | R(x)))"
           " -> all x. (~P(x) | R(x)))")


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_decide_valid(tmp_path, capsys):
    path = write(tmp_path, "barbara.fml", BARBARA)
    assert run(["decide", path]) == 0
    assert capsys.readouterr().out.strip() == "Valid"


def test_decide_json_matches_text(tmp_path, capsys):
    path = write(tmp_path, "two.fml", "ex x. ex y. x ~= y")
    assert run(["decide", path]) == 0
    text_out = capsys.readouterr().out.strip()
    assert run(["decide", "--json", path]) == 0
    data = json.loads(capsys.readouterr().out)
    assert text_out == "SizeContingent: [2,∞)"
    assert data["verdict"]["kind"] == "contingent"
    assert data["verdict"]["spectrum"] == [[2, None]]


def test_decide_trace(tmp_path, capsys):
    path = write(tmp_path, "wp.fml", "ex X. ((ex x. X(x)) & (ex x. ~X(x)))")
    assert run(["decide", "--trace", path]) == 0
    out = capsys.readouterr().out
    assert "[eliminate ex X]" in out


def test_decide_oracle_check(tmp_path, capsys):
    path = write(tmp_path, "wp.fml", "ex X. ((ex x. X(x)) & (ex x. ~X(x)))")
    assert run(["decide", "--oracle-check", "4", path]) == 0


def test_eliminate(tmp_path, capsys):
    path = write(tmp_path, "wp.fml", "ex X. ((ex x. X(x)) & (ex x. ~X(x)))")
    assert run(["eliminate", path]) == 0
    assert capsys.readouterr().out.strip() == "#[] >= 2"


def test_normalize_forms(tmp_path, capsys):
    path = write(tmp_path, "f.fml", "~(all x. (P(x) & Q(x)))")
    assert run(["normalize", "--form", "nnf", path]) == 0
    assert capsys.readouterr().out.strip() == "ex x. (~P(x) | ~Q(x))"
    assert run(["normalize", "--form", "ccnf", path]) == 0
    out = capsys.readouterr().out
    assert "#[" in out
    path2 = write(tmp_path, "g.fml", "ex x. (F(x) & (G(x) | H(x)))")
    assert run(["normalize", "--form", "blocks", path2]) == 0
    assert capsys.readouterr().out.strip() == \
        "(ex x. (F(x) & G(x))) | ex x. (F(x) & H(x))"


def test_prop_methods(tmp_path, capsys):
    path = write(tmp_path, "a.fml", "p -> ((p -> q) -> q)")
    assert run(["prop", "--method", "cnf", path]) == 0
    assert capsys.readouterr().out.strip() == "Valid"
    assert run(["prop", "--method", "table", path]) == 0
    assert capsys.readouterr().out.strip() == "Valid"
    path2 = write(tmp_path, "b.fml", "p -> q")
    assert run(["prop", "--method", "table", path2]) == 0
    assert capsys.readouterr().out.startswith("Contingent")
    assert run(["prop", "--method", "cnf", path2]) == 0
    assert capsys.readouterr().out.strip() == "NotValid"


def test_spectrum_shape(tmp_path, capsys):
    text = """
    (ex x1. ex x2. x1 ~= x2)
    & ~( (ex x1. ex x2. ex x3. ex x4.
           (x1 ~= x2 & x1 ~= x3 & x1 ~= x4 & x2 ~= x3 & x2 ~= x4 & x3 ~= x4))
       & ~(ex x1. ex x2. ex x3. ex x4. ex x5.
           (x1 ~= x2 & x1 ~= x3 & x1 ~= x4 & x1 ~= x5 & x2 ~= x3
            & x2 ~= x4 & x2 ~= x5 & x3 ~= x4 & x3 ~= x5 & x4 ~= x5)) )
    """
    path = write(tmp_path, "shape.fml", text)
    assert run(["spectrum", path]) == 0
    assert capsys.readouterr().out.strip() == "{2,3} ∪ [5,∞)"


def test_equiv_command(tmp_path, capsys):
    f1 = write(tmp_path, "f1.fml",
               "ex R. ((all x. (~A(x) | R(x))) & (all x. (~R(x) | B(x))))")
    f2 = write(tmp_path, "f2.fml", "all x. (~A(x) | B(x))")
    assert run(["equiv", "--max-size", "4", f1, f2]) == 0
    assert capsys.readouterr().out.strip() == "equivalent up to size 4"
    f3 = write(tmp_path, "f3.fml", "ex x. A(x)")
    f4 = write(tmp_path, "f4.fml", "all x. A(x)")
    assert run(["equiv", "--max-size", "4", f3, f4]) == 0
    assert capsys.readouterr().out.startswith("differ on size=2")


def test_corpus_check(capsys):
    assert run(["corpus", "--count", "25", "--seed", "11", "--check"]) == 0
    captured = capsys.readouterr()
    assert "# agreement: 25/25" in captured.err
    assert len([l for l in captured.out.splitlines() if l.strip()]) == 25


def test_corpus_output_reparses(capsys):
    from mlogic.parser import parse
    assert run(["corpus", "--count", "10", "--seed", "3"]) == 0
    for line in capsys.readouterr().out.splitlines():
        if line.strip():
            parse(line)


def test_exit_code_usage_error(capsys):
    assert run(["decide"]) == 1
    assert run(["nonsense"]) == 1


def test_exit_code_parse_error(tmp_path, capsys):
    path = write(tmp_path, "bad.fml", "p & & q")
    assert run(["decide", path]) == 1
    assert "parse error" in capsys.readouterr().err


def test_exit_code_missing_file(capsys):
    assert run(["decide", "/nonexistent/path.fml"]) == 1


def test_exit_code_out_of_scope(tmp_path, capsys):
    path = write(tmp_path, "free.fml", "P(a)")
    assert run(["decide", path]) == 2
    path2 = write(tmp_path, "so.fml", "ex X. ex x. X(x)")
    assert run(["normalize", "--form", "ccnf", path2]) == 2
    assert run(["prop", "--method", "table", path2]) == 2
    path3 = write(tmp_path, "open.fml", "ex x. P(x)")
    assert run(["spectrum", path3]) == 2


def test_exit_code_resource_limit(tmp_path, capsys):
    letters = " & ".join(f"l{i}" for i in range(25))
    path = write(tmp_path, "many.fml", letters)
    assert run(["prop", "--method", "table", path]) == 3
    assert "resource limit" in capsys.readouterr().err


def test_stdin_input(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("p | ~p"))
    assert run(["prop", "--method", "cnf", "-"]) == 0
    assert capsys.readouterr().out.strip() == "Valid"


def test_budget_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MLOGIC_BUDGET_MS", "60000")
    path = write(tmp_path, "wp.fml", "ex X. ((ex x. X(x)) & (ex x. ~X(x)))")
    assert run(["decide", "--oracle-check", "3", path]) == 0
