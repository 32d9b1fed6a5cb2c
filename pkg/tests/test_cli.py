import io
import json
import subprocess
import sys

import pytest

from tagplan.cli import FIXTURES, RunConfig, fixture_path, main, run, validate
from tagplan.errors import LoadError, ParseError
from tagplan.knowledge import Modality
from tagplan.loading import load_goals, load_scene
from tagplan.terms import atom


def files(name, **kw):
    return ["--scene", str(kw.get("scene", fixture_path(name, "scene.json"))),
            "--lexicon", str(kw.get("lexicon", fixture_path(name, "lexicon.json"))),
            "--goals", str(kw.get("goals", fixture_path(name, "goals.json")))]


def test_rabbit_run(capsys):
    assert main(files("rabbit")) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "remove the rabbit from the hat"


def test_trace_lines_come_first(capsys):
    assert main(["--fixture", "rabbit", "--trace"]) == 0
    lines = capsys.readouterr().out.splitlines()
    records = [json.loads(line) for line in lines[:-1]]
    assert [r["entry"] for r in records] == ["remove", "from the hat", "the rabbit"]
    assert lines[-1] == "remove the rabbit from the hat"


def test_malformed_lexicon(tmp_path, capsys):
    bad = tmp_path / "lex.json"
    bad.write_text('{"entries": [\n  {"name": "x",,}\n]}')
    assert main(files("rabbit", lexicon=bad)) == 2
    err = capsys.readouterr().err
    assert "lex.json:2:" in err


def test_missing_file(tmp_path, capsys):
    assert main(files("rabbit", scene=tmp_path / "nope.json")) == 2


def test_step_limit_exit_code(capsys):
    assert main(["--fixture", "rabbit", "--max-steps", "1"]) == 3
    err = capsys.readouterr().err
    assert "open substitution sites: NP↓@2.2" in err
    assert "ambiguous references" in err and "removed_1" in err


def test_search_bound_exit_code(capsys):
    assert main(["--fixture", "dh", "--search-bound", "2"]) == 4


def test_score_order_must_be_a_permutation(capsys):
    with pytest.raises(SystemExit):
        main(["--fixture", "rabbit", "--score-order", "unmet_goals,open_sites"])


def test_score_order_accepted(capsys):
    order = "unmet_goals,distractor_mass,open_sites,specificity"
    assert main(["--fixture", "dh", "--score-order", order]) == 0


def test_root_override(capsys):
    # no initial tree in the rabbit lexicon is rooted at VP
    assert main(["--fixture", "rabbit", "--root", "VP"]) == 3


def test_paths_required(capsys):
    assert main(["--scene", "x.json"]) == 2


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_validate(name):
    paths = [fixture_path(name, f) for f in ("scene.json", "lexicon.json", "goals.json")]
    report = validate(RunConfig(*map(str, paths)))
    assert all(not problems for _, problems in report), report


def test_validate_only_flag(capsys):
    assert main(["--fixture", "table", "--validate-only"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "valid"


def test_validate_catches_context_set(tmp_path, capsys):
    scene = tmp_path / "scene.json"
    scene.write_text(json.dumps({"entities": [{"id": "c1", "context_set": ["c2"]}, "c2"], "facts": []}))
    assert main(files("dh", scene=scene) + ["--validate-only"]) == 2
    out = capsys.readouterr().out
    assert "FAIL" in out and "context set of c1 does not contain c1" in out


def test_validate_catches_two_feet(tmp_path, capsys):
    lex = json.loads(fixture_path("dh", "lexicon.json").read_text())
    aux = lex["entries"][2]["tree"]
    aux["children"].append(dict(aux["children"][0]))
    path = tmp_path / "lexicon.json"
    path.write_text(json.dumps(lex))
    assert main(files("dh", lexicon=path) + ["--validate-only"]) == 2
    assert "foot" in capsys.readouterr().out


def test_validate_catches_arity(tmp_path, capsys):
    goals = {"root": "NP", "identify": ["r5"], "communicate": [["in", "r5"]]}
    path = tmp_path / "goals.json"
    path.write_text(json.dumps(goals))
    assert main(files("dh", goals=path) + ["--validate-only"]) == 2
    assert "arity" in capsys.readouterr().out


def test_run_without_argv_parsing():
    out, err = io.StringIO(), io.StringIO()
    paths = [str(fixture_path("table", f)) for f in ("scene.json", "lexicon.json", "goals.json")]
    assert run(RunConfig(*paths), out, err) == 0
    assert out.getvalue().strip() == "the table with the apple and with the banana"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tagplan", "--fixture", "kitchen"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "hold the cup under the spigot to fill it with coffee"


# -- file loading --------------------------------------------------------------


def test_scene_rejects_nonground_fact():
    with pytest.raises(LoadError):
        load_scene(json.dumps({"entities": ["a"], "facts": [{"modality": "common", "atom": ["p", "?x"]}]}))


def test_scene_rejects_bad_modality():
    with pytest.raises(LoadError):
        load_scene(json.dumps({"entities": ["a"], "facts": [{"modality": "hearer", "atom": ["p", "a"]}]}))


def test_scene_rejects_unknown_context_member():
    with pytest.raises(LoadError):
        load_scene(json.dumps({"entities": [{"id": "a", "context_set": ["a", "zz"]}]}))


def test_scene_parse_error_position():
    with pytest.raises(ParseError) as err:
        load_scene('{\n "entities": [,]}', "s.json")
    assert err.value.line == 2


def test_default_context_set_is_everything():
    scene = load_scene(json.dumps({"entities": ["a", "b"]}))
    assert scene.context_sets["a"] == {"a", "b"}


def test_most_salient_fact_derived():
    scene = load_scene(json.dumps({"entities": [{"id": "a", "context_set": ["a"]}, "b"]}))
    assert scene.kb.provable(Modality.COMMON, [atom("most-salient", "a")])
    assert not scene.kb.provable(Modality.COMMON, [atom("most-salient", "b")])


def test_goals_string_root():
    g = load_goals(json.dumps({"root": "NP", "identify": ["t1"]}))
    assert g.root_category == "NP" and g.root_entities == ()


def test_goals_need_ground_features():
    with pytest.raises(LoadError):
        load_goals(json.dumps({"root": "S", "brand_new": [{"entity": "a", "features": [["p", "?x"]]}]}))
