"""Smoke test for the hierassoc_py extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml --release`,
then run `python3 python/smoke_test.py`.
"""

import os
import tempfile

import hierassoc_py as ha


def main():
    a = ha.AssocArray.from_triples([("x", "y", 2), ("x", "y", 3), ("x", "z", 0)])
    assert a.to_triples() == [("x", "y", 5)], a.to_triples()
    assert a.nnz() == 1 and a.col_keys() == ["y"]

    b = ha.AssocArray([("y", "w", 4)])
    assert (a @ b).to_triples() == [("x", "w", 20)]
    assert a.matmul(b, "max_plus").to_triples() == [("x", "w", 9)]
    assert (a + a).get("x", "y") == 10
    assert a.transpose().to_triples() == [("y", "x", 5)]
    assert "max_min" in ha.SEMIRINGS

    h = ha.HierArray(cuts=[2, 4])
    for batch in ([("a", "b", 1)] * 2, [("a", "c", 1), ("d", "e", 1)], [("f", "g", 1)] * 3):
        h.insert_batch(batch)
    stats = h.stats()
    assert stats["lifetime_updates"] == 7, stats
    assert len(stats["layer_nnz"]) == 3
    m = h.materialize()
    assert m.get("f", "g") == 3 and m.get("a", "b") == 2
    assert h.query_neighbors("a").col_keys() == ["b", "c"]
    h.compact()
    assert h.layer_nnz()[:-1] == [0, 0] and h.materialize() == m

    try:
        ha.HierArray(cuts=[4, 2])
    except ValueError:
        pass
    else:
        raise AssertionError("non-increasing cuts accepted")

    batch = ha.gen_batch(0, 1000, vertex_count=100, seed=7, key_format="dotted-quad")
    assert len(batch) == 1000 and batch == ha.gen_batch(0, 1000, vertex_count=100, seed=7, key_format="dotted-quad")
    assert ha.format_key(1, "dotted-quad") == "0.0.0.1"

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "b.tsv")
        assert ha.save_tsv(batch, path) == 1000
        assert ha.load_tsv(path) == batch
        try:
            ha.load_tsv(os.path.join(d, "missing.tsv"))
        except OSError:
            pass
        else:
            raise AssertionError("missing file accepted")

    report = ha.run_bench(workers=2, entries_per_worker=4000, batch_size=1000, vertex_count=1000, verify=True)
    assert report["aggregate"]["updates"] == 8000
    assert len(report["workers"]) == 2

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
