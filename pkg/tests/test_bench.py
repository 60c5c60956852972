from __future__ import annotations

import json

import pytest

from recursum.bench import SHELL_CLASSES, bench_targets, run_bench, time_callable
from recursum.errors import EvaluationError
from recursum.library import builtin


def test_time_callable_counts_calls():
    calls = []
    median, total = time_callable(lambda: calls.append(1), reps=3, min_calls=64, min_time=1.0)
    assert median > 0
    assert total >= 3 * 64
    # ten warm-up calls precede the timed ones
    assert len(calls) == total + 10


def test_time_callable_respects_time_cap():
    _, total = time_callable(lambda: sum(range(200)), reps=2, min_calls=10**9, min_time=0.01)
    assert 0 < total < 10**9


def test_bench_targets():
    herm = builtin("hermite_e")
    assert [l for l, _ in bench_targets(herm, 8)] == [l for l, _ in SHELL_CLASSES]
    assert [k for _, k in bench_targets(herm, 2)] == [(0, 0), (0, 1), (1, 1), (0, 2)]
    fib = bench_targets(builtin("fibonacci"), 20)
    assert len(fib) == 8 and fib[0] == ("point", (0,)) and fib[-1] == ("point", (20,))
    binom = bench_targets(builtin("binomial"), 6)
    assert all(label == "layer" for label, _ in binom)


@pytest.fixture(scope="module")
def hermite_report():
    return run_bench("hermite_e", bound=4, reps=1, profile="python", min_calls=20, min_time=0.001)


def test_bench_rows(hermite_report):
    rows = hermite_report.by_backend()
    assert set(rows) == {"unrolled", "layered", "runtime"}
    assert all(len(r) == 6 for r in rows.values())  # ss sp pp sd pd dd
    assert all(r.median_ns > 0 and r.iterations >= 16 for r in hermite_report.records)
    assert "label" in hermite_report.text()


def test_layered_ops_win_on_large_layers(hermite_report):
    rows = hermite_report.by_backend()
    for u, l in zip(rows["unrolled"], rows["layered"]):
        assert u.key == l.key
        # small layers pay for the shared prefix; reuse wins from dd up
        if sum(u.key) >= 4:
            assert l.ops.flops <= u.ops.flops


def test_report_json_round_trip(hermite_report):
    payload = json.loads(hermite_report.dumps())
    assert payload == hermite_report.to_json()
    assert [o["backend"] for o in payload] == ["unrolled", "layered", "runtime"]
    assert payload[0]["rows"][0]["tuple"] == [0, 0]


def test_bench_refuses_unvalidated(monkeypatch):
    import recursum.bench as bench

    class Bad:
        ok = False

        def text(self):
            return "FAIL"

    monkeypatch.setattr(bench, "validate", lambda *a, **k: Bad())
    with pytest.raises(EvaluationError):
        bench.run_bench("fibonacci", reps=1, profile="python", min_calls=1, min_time=0.001)
