import json
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from aqcls.evolution import Schedule
from aqcls.hamiltonians import ProblemFamily, transverse_field_initial
from aqcls.records import LearnedAlgorithmRecord, append_record, learned_record, read_records
from aqcls.search import AqclsConfig, run_aqcls

finite = st.floats(allow_nan=False, allow_infinity=False)


records = st.builds(
    LearnedAlgorithmRecord,
    objective_id=st.text(max_size=12),
    h_i_id=st.sampled_from(["transverse", "grover"]),
    schedule_id=st.sampled_from(["linear", "tanh_like(k=3)"]),
    family_id=st.text(max_size=12),
    w_star=st.lists(finite, max_size=8).map(tuple),
    tabu=st.lists(st.integers(0, 63), max_size=10).map(tuple),
    tau=finite,
    x_star=st.integers(0, 63),
    f_star=finite,
    seed=st.integers(0, 2**32),
    iterations=st.integers(0, 10_000),
    ground_index=st.integers(0, 63),
    ground_degenerate=st.booleans(),
    min_gap=finite,
    best_f=st.one_of(st.none(), finite),
)


@settings(max_examples=100, deadline=None)
@given(records)
def test_json_round_trip_is_lossless(rec):
    assert LearnedAlgorithmRecord.from_json(rec.to_json()) == rec


def test_learned_record_verification_fields():
    f = np.array([3.0, 1.0, 2.0, 0.0])
    fam = ProblemFamily.diagonal(4, (-1, 1))
    hi = transverse_field_initial(2)
    res = run_aqcls(f, fam, hi, Schedule(), AqclsConfig(seed=0, n_max=20))
    rec = learned_record(res, "t4", hi, Schedule(), fam)
    diag = np.diag(res.H_P.matrix)
    assert rec.ground_index == int(np.argmin(diag))
    assert rec.min_gap > 0 and rec.family_id == "diagonal-4" and rec.h_i_id == "transverse"
    assert rec.tabu == res.tabu.penalized and rec.iterations == res.iterations


def _writer(args):
    path, k = args
    rec = LearnedAlgorithmRecord("o" * 2000, "transverse", "linear", "fam", tuple(range(50)), (1, 2), 1.0, k, 0.0,
                                 k, 1, 0, False, 1.0)
    for _ in range(20):
        append_record(path, rec)
    return k


def test_concurrent_appends_never_interleave(tmp_path):
    path = tmp_path / "results.jsonl"
    with ProcessPoolExecutor(4) as pool:
        list(pool.map(_writer, [(str(path), k) for k in range(8)]))
    lines = path.read_text().splitlines()
    assert len(lines) == 160
    for line in lines:
        json.loads(line)
    assert sorted({r.seed for r in read_records(path)}) == list(range(8))


def test_read_missing_store(tmp_path):
    assert read_records(tmp_path / "none.jsonl") == []
