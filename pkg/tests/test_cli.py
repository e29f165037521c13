"""Command line behavior: exit codes, formats, file outputs."""

import json

import pytest

from conceptforge.cli import main
from conceptforge.graphs import ConceptGraph, GraphNode, save_concept_graph
from conceptforge.store import load_store


@pytest.fixture()
def store_path(tmp_path):
    path = tmp_path / "demo.cmdb.json"
    assert main(["--store", str(path), "init", "--demo"]) == 0
    return str(path)


def _graph_file(tmp_path, middle="ascending-sort"):
    graph = ConceptGraph(
        nodes=(GraphNode("n1", "read-list"), GraphNode("n2", middle),
               GraphNode("n3", "print-list")),
        edges=(("n1", "n2"), ("n2", "n3")))
    path = tmp_path / "pipeline.cmap.json"
    save_concept_graph(graph, str(path))
    return str(path)


def test_init_creates_empty_store(tmp_path, capsys):
    path = tmp_path / "fresh.cmdb.json"
    assert main(["--store", str(path), "init"]) == 0
    assert "0 concepts" in capsys.readouterr().out
    assert len(load_store(str(path)).concepts) == 0


def test_init_demo_seeds_concepts(store_path):
    store = load_store(store_path)
    assert "insertion-sort" in store.concepts
    assert len(store.concepts) == 17


def test_init_refuses_to_overwrite(store_path, capsys):
    assert main(["--store", store_path, "init"]) == 1
    assert "io-error" in capsys.readouterr().err


def test_add_concept_from_file(tmp_path, store_path, capsys):
    payload = {
        "id": "double-it", "name": "double a number",
        "description": "", "kind": "terminal",
        "inputs": [{"name": "x", "dtype": "int"}],
        "outputs": [{"name": "x", "dtype": "int"}],
        "keywords": ["double"],
        "curation": {"author": "t", "created": "2026-01-01T00:00:00Z",
                     "notes": ""},
        "snippet": "func double_it(x: int) -> int { return x * 2; }",
    }
    file = tmp_path / "double.json"
    file.write_text(json.dumps(payload))
    assert main(["--store", store_path, "add", "-f", str(file)]) == 0
    assert "added double-it" in capsys.readouterr().out
    assert "double-it" in load_store(store_path).concepts


def test_add_bad_json_fails_cleanly(tmp_path, store_path, capsys):
    file = tmp_path / "bad.json"
    file.write_text("{nope")
    assert main(["--store", store_path, "add", "-f", str(file)]) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1  # single-line error


def test_duplicate_link_exits_one_with_code(store_path, capsys):
    args = ["--store", store_path, "link", "find-max", "ascending-sort"]
    assert main(args) == 0
    assert main(args) == 1
    assert "duplicate-edge" in capsys.readouterr().err


def test_search_json_is_id_score_array(store_path, capsys):
    assert main(["--store", store_path, "--format", "json",
                 "search", "sort"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert all(set(row) == {"id", "score"} for row in rows)
    assert rows[0]["score"] >= rows[-1]["score"]
    assert any(row["id"] == "insertion-sort" for row in rows)


def test_search_no_matches_text(store_path, capsys):
    assert main(["--store", store_path, "search", "zeppelin"]) == 0
    assert "no matches" in capsys.readouterr().out


def test_generate_then_run_prints_sorted_list(tmp_path, store_path, capsys):
    out = tmp_path / "out.mini"
    assert main(["--store", store_path, "generate",
                 _graph_file(tmp_path), "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["run", str(out), "--entry", "main"]) == 0
    assert "[1, 2, 5, 9]" in capsys.readouterr().out


def test_generate_json_payload(tmp_path, store_path, capsys):
    assert main(["--store", store_path, "--format", "json", "generate",
                 _graph_file(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["backend"] == "minilang"
    assert "func main()" in payload["source"]
    assert set(payload["provenance"]) == {"n1", "n2", "n3"}


def test_generate_missing_graph_file(store_path, capsys):
    assert main(["--store", store_path, "generate", "absent.cmap.json"]) == 1
    assert "io-error" in capsys.readouterr().err


def test_run_passes_arguments(tmp_path, capsys):
    source = tmp_path / "id.mini"
    source.write_text("func main(x: int) -> int { return x; }\n")
    assert main(["run", str(source), "--arg", "41"]) == 0
    assert capsys.readouterr().out.strip() == "41"


def test_run_list_argument(tmp_path, capsys):
    source = tmp_path / "first.mini"
    source.write_text("func main(xs: list) -> int { return xs[0]; }\n")
    assert main(["run", str(source), "--arg", "[9, 8]"]) == 0
    assert capsys.readouterr().out.strip() == "9"


def test_run_reports_parse_errors(tmp_path, capsys):
    source = tmp_path / "broken.mini"
    source.write_text("func main( {\n")
    assert main(["run", str(source)]) == 1
    assert "parse-error" in capsys.readouterr().err


def test_run_json_format(tmp_path, capsys):
    source = tmp_path / "hi.mini"
    source.write_text('func main() { print("hi"); }\n')
    assert main(["--format", "json", "run", str(source)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"stdout": "hi\n", "result": None}


def test_cluster_report_and_artifacts(tmp_path, store_path, capsys):
    # an alpha twin of the counted loop gives the report something to
    # suggest merging
    from conceptforge.corpus_data import load_snippet

    twin = {
        "id": "tally-steps", "name": "tally steps", "description": "",
        "kind": "terminal",
        "inputs": [{"name": "limit", "dtype": "int"}],
        "outputs": [{"name": "acc", "dtype": "int"}],
        "keywords": ["tally"],
        "curation": {"author": "t", "created": "2026-01-01T00:00:00Z",
                     "notes": ""},
        "snippet": load_snippet("tally_steps"),
    }
    twin_file = tmp_path / "twin.json"
    twin_file.write_text(json.dumps(twin))
    assert main(["--store", store_path, "add", "-f", str(twin_file)]) == 0

    matrix = tmp_path / "matrix.csv"
    figure = tmp_path / "matrix.png"
    assert main(["--store", store_path, "cluster", "--threshold", "0.9",
                 "--matrix", str(matrix), "--figure", str(figure)]) == 0
    out = capsys.readouterr().out
    assert "clusters at threshold 0.9" in out
    assert "consider a common parent concept for: for-counter-loop, " \
           "tally-steps" in out
    header = matrix.read_text().splitlines()[0]
    assert header.startswith("id,")
    assert "insertion-sort" in header
    assert figure.read_bytes()[:4] == b"\x89PNG"


def test_cluster_json_payload(store_path, capsys):
    assert main(["--store", store_path, "--format", "json", "cluster",
                 "--threshold", "0.9"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert ["for-counter-loop", "while-counter-loop"] not in payload["clusters"]
    assert payload["rounds"] == 3
    assert len(payload["matrix"]) == len(payload["ids"])


def test_cluster_threshold_validation(store_path, capsys):
    assert main(["--store", store_path, "cluster",
                 "--threshold", "1.5"]) == 1
    assert "threshold-out-of-range" in capsys.readouterr().err


def test_harvest_searches_bundled_corpus(capsys):
    assert main(["--format", "json", "harvest",
                 "a function that merge sorts a list"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["keywords"] == ["function", "merge", "sorts", "list"]
    assert payload["candidates"]
    assert payload["candidates"][0]["score"] >= \
        payload["candidates"][-1]["score"]


def test_harvest_unknown_provider(capsys):
    assert main(["harvest", "sort", "--provider", "nope"]) == 1
    assert "unknown provider" in capsys.readouterr().err


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["add"])  # missing -f
    assert info.value.code == 2


def test_missing_store_fails_cleanly(tmp_path, capsys):
    assert main(["--store", str(tmp_path / "none.cmdb.json"),
                 "search", "sort"]) == 1
    assert "io-error" in capsys.readouterr().err
