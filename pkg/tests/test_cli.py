import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_relation_matrix
from mtfuzzy.cli import main, parse_manifest
from mtfuzzy.exceptions import ParseError
from mtfuzzy.fmtr import Entries, format_fmtr, read_fmtr
from mtfuzzy.image import Image, encode_pnm


def write_rel(path, m, p):
    path.write_text(format_fmtr(Entries.from_dense(np.asarray(m), p)))
    return str(path)


def write_img(path, arr):
    path.write_bytes(encode_pnm(Image.from_array(np.asarray(arr))))
    return str(path)


def test_affinity_single_pixel(tmp_path, capsys):
    img = write_img(tmp_path / "a.ppm", [[[1, 2, 3]]])
    out = tmp_path / "a.fmtr"
    assert main(["affinity", img, "--precision", "1", "--out", str(out)]) == 0
    assert out.read_text() == "FMTR 1 1 1\n0 0 10\n"
    assert "engine=mtbdd" in capsys.readouterr().out


def test_affinity_constant_2x2(tmp_path):
    img = write_img(tmp_path / "c.ppm", np.full((2, 2, 3), 80))
    out = tmp_path / "c.fmtr"
    assert main(["affinity", img, "-p", "1", "-o", str(out)]) == 0
    e = read_fmtr(out)
    d = e.to_dense()
    assert (np.diagonal(d) == 10).all() and np.count_nonzero(d) == 4 + 8
    first = out.read_bytes()
    assert main(["affinity", img, "-p", "1", "-o", str(out)]) == 0
    assert out.read_bytes() == first


def test_compose_identity_both_engines(tmp_path, rng):
    m = random_relation_matrix(rng, 11, 100, density=0.3)
    r = write_rel(tmp_path / "r.fmtr", m, 2)
    ident = write_rel(tmp_path / "i.fmtr", np.eye(11, dtype=int) * 100, 2)
    for engine in ("mtbdd", "dense"):
        out = tmp_path / f"o_{engine}.fmtr"
        assert main(["compose", ident, r, "--engine", engine, "-o", str(out)]) == 0
        assert out.read_text() == (tmp_path / "r.fmtr").read_text()


def test_compose_engines_byte_identical(tmp_path, rng):
    for seed in range(5):
        a = write_rel(tmp_path / "a.fmtr", random_relation_matrix(rng, 16, 10), 1)
        b = write_rel(tmp_path / "b.fmtr", random_relation_matrix(rng, 16, 10), 1)
        outs = []
        for engine in ("mtbdd", "dense"):
            out = tmp_path / f"{engine}.fmtr"
            assert main(["compose", a, b, "--engine", engine, "-o", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


def test_compose_constant_report(tmp_path, capsys):
    r = write_rel(tmp_path / "k.fmtr", np.full((64, 64), 5), 1)
    assert main(["compose", r, r, "-o", str(tmp_path / "o.fmtr")]) == 0
    line = capsys.readouterr().out.strip()
    fields = dict(kv.split("=", 1) for kv in line.split())
    assert int(fields["entries"]) == 4096
    assert int(fields["nodes"]) < 100


def test_compose_mismatch(tmp_path, capsys):
    a = write_rel(tmp_path / "a.fmtr", np.eye(3, dtype=int) * 10, 1)
    b = write_rel(tmp_path / "b.fmtr", np.eye(4, dtype=int) * 10, 1)
    assert main(["compose", a, b, "-o", str(tmp_path / "o.fmtr")]) == 1
    assert "incompatible" in capsys.readouterr().err


def test_closure_examples(tmp_path, capsys):
    chain = write_rel(tmp_path / "c.fmtr", [[10, 5, 0], [5, 10, 8], [0, 8, 10]], 1)
    ident = write_rel(tmp_path / "i.fmtr", np.eye(5, dtype=int) * 10, 1)
    for engine in ("mtbdd", "dense"):
        out = tmp_path / "o.fmtr"
        assert main(["closure", chain, "--engine", engine, "-o", str(out)]) == 0
        assert "0 2 5" in out.read_text().splitlines()
        assert main(["closure", ident, "--engine", engine, "-o", str(out)]) == 0
        assert out.read_text() == (tmp_path / "i.fmtr").read_text()
    assert "iterations=" in capsys.readouterr().out


def test_closure_engines_identical_24(tmp_path, rng):
    for _ in range(3):
        m = random_relation_matrix(rng, 24, 10, density=0.1, reflexive=True, symmetric=True)
        r = write_rel(tmp_path / "r.fmtr", m, 1)
        outs = []
        for engine in ("mtbdd", "dense"):
            out = tmp_path / f"{engine}.fmtr"
            assert main(["closure", r, "--engine", engine, "-o", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


def test_closure_rejects_non_reflexive(tmp_path, capsys):
    r = write_rel(tmp_path / "r.fmtr", [[10, 3], [3, 4]], 1)
    assert main(["closure", r, "-o", str(tmp_path / "o.fmtr")]) == 1
    assert "reflexive" in capsys.readouterr().err


def test_dense_size_guard(tmp_path, capsys):
    r = write_rel(tmp_path / "r.fmtr", np.eye(8, dtype=int) * 10, 1)
    assert main(["closure", r, "--engine", "dense", "--max-dense", "4",
                 "-o", str(tmp_path / "o.fmtr")]) == 1
    assert "refuses" in capsys.readouterr().err


def test_stats(tmp_path, capsys):
    n = 5200
    big = tmp_path / "big.fmtr"
    big.write_text(f"FMTR 1 {n} 1\n" + "".join(f"{i} {i} 10\n" for i in range(n)))
    assert main(["stats", str(big)]) == 0
    assert "array_kb=81120" in capsys.readouterr().out
    empty = write_rel(tmp_path / "e.fmtr", np.zeros((4, 4), dtype=int), 1)
    assert main(["stats", empty, "--threshold", "1"]) == 0
    out = capsys.readouterr().out
    assert "nodes=0" in out and "mtbdd_kb=0" in out and "pairs=0" in out


def test_bench(tmp_path):
    write_img(tmp_path / "img.ppm", np.random.default_rng(1).integers(0, 256, (4, 5, 3)))
    write_rel(tmp_path / "r.fmtr", np.eye(6, dtype=int) * 100, 2)
    (tmp_path / "jobs.txt").write_text(
        "# input engine precision\n"
        "img.ppm mtbdd 1\nimg.ppm dense 1\nimg.ppm mtbdd 2\n\nr.fmtr dense 2\nr.fmtr mtbdd 2\n")
    out = tmp_path / "bench.csv"
    assert main(["bench", str(tmp_path / "jobs.txt"), "-o", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["input", "engine", "op", "precision", "seconds", "entries", "nodes",
                       "terminals", "kb", "iterations"]
    assert len(rows) == 1 + 5
    assert [r[1] for r in rows[1:]] == ["mtbdd", "dense", "mtbdd", "dense", "mtbdd"]
    dense = rows[2]
    assert dense[6] == dense[7] == "" and dense[8] == str(3 * 20 * 20 // 1000)


def test_bench_compose_with_workers(tmp_path):
    write_rel(tmp_path / "r.fmtr", np.eye(6, dtype=int) * 10, 1)
    (tmp_path / "m.txt").write_text("r.fmtr mtbdd 1\nr.fmtr dense 1\n")
    out = tmp_path / "b.csv"
    assert main(["bench", str(tmp_path / "m.txt"), "--op", "compose", "--jobs", "2",
                 "-o", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert [r[2] for r in rows[1:]] == ["compose", "compose"]


def test_manifest_errors():
    with pytest.raises(ParseError) as info:
        parse_manifest("a.ppm mtbdd 1\n\nb.ppm gpu 1\n")
    assert info.value.line == 3
    with pytest.raises(ParseError):
        parse_manifest("a.ppm mtbdd 4\n")
    with pytest.raises(ParseError):
        parse_manifest("a.ppm mtbdd\n")


def test_bench_precision_mismatch(tmp_path, capsys):
    write_rel(tmp_path / "r.fmtr", np.eye(2, dtype=int) * 10, 1)
    (tmp_path / "m.txt").write_text("r.fmtr mtbdd 2\n")
    assert main(["bench", str(tmp_path / "m.txt")]) == 1
    assert "line 1" in capsys.readouterr().err


def test_exit_status_subprocess(tmp_path):
    bad = tmp_path / "bad.fmtr"
    bad.write_text("nonsense\n")
    proc = subprocess.run([sys.executable, "-m", "mtfuzzy", "stats", str(bad)],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == "" and "bad header" in proc.stderr
    ok = write_rel(tmp_path / "ok.fmtr", [[10]], 1)
    proc = subprocess.run([sys.executable, "-m", "mtfuzzy", "stats", ok],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stderr == ""
