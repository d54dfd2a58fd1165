import json

import pytest

from citnet.cli import main
from citnet.ingest import write_pair_files
from citnet.synth import matching_corpus, workflow_corpus

from conftest import make_pubs


@pytest.fixture
def triangle_files(tmp_path):
    pubs = make_pubs({"A": 2002, "B": 2001, "C": 2000})
    edges = [("A", "B"), ("B", "C"), ("A", "C")]
    p = tmp_path / "pubs.tsv"
    c = tmp_path / "cites.tsv"
    write_pair_files(pubs, edges, p, c)
    return str(p), str(c)


@pytest.fixture
def diamond_files(tmp_path):
    pubs = make_pubs({"A": 2000, "B": 2001, "C": 2001, "D": 2002})
    edges = [("D", "B"), ("D", "C"), ("B", "A"), ("C", "A"), ("D", "A")]
    p = tmp_path / "dpubs.tsv"
    c = tmp_path / "dcites.tsv"
    write_pair_files(pubs, edges, p, c)
    return str(p), str(c)


def test_reduce_triangle_two_lines(triangle_files, tmp_path, capsys):
    p, c = triangle_files
    out = tmp_path / "reduced.tsv"
    assert main(["reduce", "--pubs", p, "--cites", c, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert sorted(lines) == ["A\tB", "B\tC"]


def test_path_longest_diamond(diamond_files, tmp_path):
    p, c = diamond_files
    out = tmp_path / "paths.json"
    assert main(["path", "--pubs", p, "--cites", c, "--from", "D", "--to", "A",
                 "--kind", "longest", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["length"] == 2
    assert sorted(map(tuple, doc["paths"])) == [("D", "B", "A"), ("D", "C", "A")]


def test_cluster_and_components_tables(triangle_files, tmp_path):
    p, c = triangle_files
    out = tmp_path / "clusters.tsv"
    assert main(["cluster", "--pubs", p, "--cites", c, "--seed", "1", "--out", str(out)]) == 0
    rows = dict(line.split("\t") for line in out.read_text().strip().splitlines())
    assert set(rows) == {"A", "B", "C"}
    out2 = tmp_path / "comp.tsv"
    assert main(["components", "--pubs", p, "--cites", c, "--out", str(out2)]) == 0
    comp = dict(line.split("\t") for line in out2.read_text().strip().splitlines())
    assert set(comp.values()) == {"1"}


def test_cores_output(tmp_path):
    pubs = make_pubs({f"c{i}": 2000 + i for i in range(4)} | {"leaf": 2010})
    edges = [(f"c{i}", f"c{j}") for i in range(4) for j in range(i)] + [("leaf", "c0")]
    p, c = tmp_path / "p.tsv", tmp_path / "c.tsv"
    write_pair_files(pubs, edges, p, c)
    out = tmp_path / "core.txt"
    assert main(["cores", "--pubs", str(p), "--cites", str(c), "--k", "3",
                 "--out", str(out)]) == 0
    assert out.read_text().split() == ["c0", "c1", "c2", "c3"]


def test_layout_frame_and_svg(triangle_files, tmp_path):
    p, c = triangle_files
    frame_path = tmp_path / "frame.json"
    svg_path = tmp_path / "frame.svg"
    assert main(["layout", "--pubs", p, "--cites", c, "--reduction",
                 "--out", str(frame_path), "--svg", str(svg_path)]) == 0
    doc = json.loads(frame_path.read_text())
    assert doc["version"] == 1
    assert len(doc["nodes"]) == 3
    assert len(doc["edges"]) == 2  # transitive reduction of the triangle
    assert svg_path.read_text().startswith("<svg")


def test_byte_identical_reruns(triangle_files, tmp_path):
    p, c = triangle_files
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        assert main(["layout", "--pubs", p, "--cites", c, "--seed", "7",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_load_wos_and_report(tmp_path):
    from citnet.ingest import format_wos_export
    corpus = matching_corpus(seed=3, n_records=120)
    wos = tmp_path / "export.txt"
    wos.write_text(format_wos_export(corpus.records), encoding="utf-8")
    out_p, out_c = tmp_path / "out_p.tsv", tmp_path / "out_c.tsv"
    report = tmp_path / "report.json"
    assert main(["load", "--wos", str(wos), "--out-pubs", str(out_p),
                 "--out-cites", str(out_c), "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["total_references"] == (
        doc["matched_references"] + doc["incomplete_citations"] + doc["unmatched_references"]
    )
    # emitted pair files load back into the same network
    assert main(["reduce", "--pubs", str(out_p), "--cites", str(out_c),
                 "--out", str(tmp_path / "r.tsv")]) == 0


def test_exit_codes(tmp_path, capsys):
    # usage error -> 1
    with pytest.raises(SystemExit) as exc:
        main(["reduce", "--pubs"])
    assert exc.value.code == 1
    assert "citnet: error: usage:" in capsys.readouterr().err
    # missing file -> 2
    assert main(["reduce", "--pubs", str(tmp_path / "no.tsv"),
                 "--cites", str(tmp_path / "no2.tsv")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("citnet: error: format:")
    # format error -> 2
    bad = tmp_path / "bad.tsv"
    bad.write_text("wrong\theader\n")
    cite = tmp_path / "cite.tsv"
    cite.write_text("citing_id\tcited_id\n")
    assert main(["reduce", "--pubs", str(bad), "--cites", str(cite)]) == 2
    # contract violation -> 3
    pubs = make_pubs({"A": 2000})
    p, c = tmp_path / "p.tsv", tmp_path / "c.tsv"
    write_pair_files(pubs, [], p, c)
    assert main(["path", "--pubs", str(p), "--cites", str(c),
                 "--from", "A", "--to", "MISSING"]) == 3
    assert "citnet: error: contract:" in capsys.readouterr().err


def test_help_exits_zero():
    for cmd in ("load", "reduce", "cluster", "cores", "components",
                "path", "layout", "drill", "expand", "serve"):
        with pytest.raises(SystemExit) as exc:
            main([cmd, "--help"])
        assert exc.value.code == 0


def test_pipeline_script_two_stage_clustering(tmp_path):
    # cluster at high resolution, drill into one cluster, re-cluster at 1.0
    corpus = workflow_corpus()
    p, c = tmp_path / "p.tsv", tmp_path / "c.tsv"
    write_pair_files(corpus.publications, corpus.edges, p, c)
    script = tmp_path / "script.json"
    script.write_text(json.dumps({
        "steps": [
            {"op": "cluster", "resolution": 5.0, "seed": 11},
            {"op": "drill", "selection": {"mode": "by_group", "group_id": 1}},
            {"op": "cluster", "resolution": 1.0, "seed": 11},
        ]
    }))
    out = tmp_path / "report.json"
    assert main(["drill", "--pubs", str(p), "--cites", str(c),
                 "--script", str(script), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["steps"]) == 3
    # drilling into cluster 1 shrank the network
    assert doc["steps"][1]["members"] < corpus.manifest["total_publications"]
    assert doc["steps"][2]["members"] == doc["steps"][1]["members"]


def test_pipeline_unknown_op_is_format_error(tmp_path, triangle_files, capsys):
    p, c = triangle_files
    script = tmp_path / "s.json"
    script.write_text(json.dumps({"steps": [{"op": "fly"}]}))
    assert main(["drill", "--pubs", p, "--cites", c, "--script", str(script)]) == 2


def test_env_var_sets_default_seed(tmp_path, monkeypatch):
    corpus = workflow_corpus()
    p, c = tmp_path / "p.tsv", tmp_path / "c.tsv"
    write_pair_files(corpus.publications, corpus.edges, p, c)
    monkeypatch.setenv("CITNET_SEED", "123")
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    assert main(["cluster", "--pubs", str(p), "--cites", str(c), "--out", str(a)]) == 0
    assert main(["cluster", "--pubs", str(p), "--cites", str(c), "--seed", "123",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
