import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.io import arff as scipy_arff

from eyestate import Recording, load_recording, parse_arff, parse_csv, summarize, write_csv
from eyestate.exceptions import (EmptyData, InvalidLabel, MalformedHeader,
                                 NonNumericValue, ParseError, RaggedRow)

ARFF = """% a comment
@RELATION eeg
@attribute AF3 numeric
@ATTRIBUTE 'F 7' REAL
@attribute eyeDetection {0,1}

@DATA
1.0,2.0,0
1.0,2.0,1
"""


def test_arff_echoes_values():
    rec = parse_arff(ARFF.encode())
    assert rec.names == ("AF3", "F 7")
    np.testing.assert_array_equal(rec.values, [[1.0, 2.0], [1.0, 2.0]])
    np.testing.assert_array_equal(rec.labels, [0, 1])
    assert rec.sample_rate_hz == 128


def test_arff_matches_scipy_reader(synthetic_rec):
    lines = ["@relation s"] + [f"@attribute {n} numeric" for n in synthetic_rec.names]
    lines += ["@attribute eyeDetection {0,1}", "@data"]
    sub = synthetic_rec.take_rows(np.arange(500))
    lines += [",".join(repr(float(v)) for v in row) + f",{lab}"
              for row, lab in zip(sub.values, sub.labels)]
    text = "\n".join(lines) + "\n"
    rec = parse_arff(text.encode())
    data, meta = scipy_arff.loadarff(io.StringIO(text))
    for name in rec.names:
        np.testing.assert_array_equal(rec.channel(name), data[name])
    np.testing.assert_array_equal(rec.labels, data["eyeDetection"].astype(int))


def test_arff_header_without_rows():
    with pytest.raises(EmptyData):
        parse_arff(ARFF.split("@DATA")[0].encode() + b"@DATA\n")


@pytest.mark.parametrize("text, err", [
    (ARFF.replace("1.0,2.0,1", "1.0,abc,1"), NonNumericValue),
    (ARFF.replace("1.0,2.0,1", "1.0,2.0,2"), InvalidLabel),
    (ARFF.replace("1.0,2.0,1", "1.0,1"), RaggedRow),
    (ARFF.replace("@attribute AF3 numeric", "@attribute AF3 string"), MalformedHeader),
    (ARFF.replace("@DATA", ""), ParseError),
])
def test_arff_errors(text, err):
    with pytest.raises(err):
        parse_arff(text.encode())


def test_csv_small_table():
    rec = parse_csv(b"a,b,y\n1,2,0\n3,4,1\n5,6,0\n")
    assert rec.n_channels == 2 and rec.n_samples == 3
    rec = parse_csv(b"1,2,0\n3,4,1\n", has_header=False)
    assert rec.names == ("ch0", "ch1")


def test_csv_ragged_row():
    header = ",".join(f"c{i}" for i in range(14)) + ",y\n"
    good = ",".join(["1"] * 14) + ",0\n"
    bad = ",".join(["1"] * 12) + ",0\n"
    with pytest.raises(RaggedRow):
        parse_csv((header + good + bad).encode())


def test_csv_errors():
    with pytest.raises(NonNumericValue):
        parse_csv(b"a,b,y\n1,x,0\n")
    with pytest.raises(InvalidLabel):
        parse_csv(b"a,b,y\n1,2,3\n")


def test_csv_and_arff_agree(synthetic_rec):
    sub = synthetic_rec.take_rows(np.arange(200))
    lines = ["@relation s"] + [f"@attribute {n} numeric" for n in sub.names]
    lines += ["@attribute eyeDetection {0,1}", "@data"]
    lines += [",".join(repr(float(v)) for v in row) + f",{lab}"
              for row, lab in zip(sub.values, sub.labels)]
    from_arff = parse_arff("\n".join(lines).encode())
    from_csv = parse_csv(write_csv(sub).encode())
    assert from_arff == from_csv == sub


def test_load_by_suffix(tmp_path, synthetic_rec):
    sub = synthetic_rec.take_rows(np.arange(50))
    p = tmp_path / "x.csv"
    p.write_text(write_csv(sub, config={"seed": 3}))
    assert load_recording(p) == sub


def test_summarize_counts():
    rec = Recording(names=("a", "b"), values=np.zeros((5, 2)), labels=[0, 0, 1, 1, 0])
    s = summarize(rec)
    assert s.label_counts == {0: 3, 1: 2}
    assert s.transitions == 2
    assert "label,count" in s.counts_csv()
    rec = Recording(names=("a", "b"), values=np.zeros((4, 2)), labels=[1, 1, 1, 1])
    assert summarize(rec).transitions == 0


def test_recording_invariants():
    with pytest.raises(ValueError):
        Recording(names=("a",), values=np.zeros((3, 1)), labels=[0, 1, 0])
    with pytest.raises(ValueError):
        Recording(names=("a", "a"), values=np.zeros((3, 2)), labels=[0, 1, 0])
    with pytest.raises(ValueError):
        Recording(names=("a", "b"), values=np.full((3, 2), np.nan), labels=[0, 1, 0])
    with pytest.raises(ValueError):
        Recording(names=("a", "b"), values=np.zeros((3, 2)), labels=[0, 2, 0])
    with pytest.raises(ValueError):
        Recording(names=("a", "b"), values=np.zeros((3, 2)), labels=[0, 1, 0], sample_rate_hz=0)


tables = st.integers(2, 5).flatmap(lambda c: st.tuples(
    st.lists(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=c, max_size=c),
             min_size=1, max_size=20),
    st.just(c)))


@settings(max_examples=60, deadline=None)
@given(tables, st.data())
def test_csv_round_trip(table, data):
    rows, c = table
    labels = data.draw(st.lists(st.integers(0, 1), min_size=len(rows), max_size=len(rows)))
    rec = Recording(names=tuple(f"c{i}" for i in range(c)), values=np.array(rows), labels=labels)
    back = parse_csv(write_csv(rec).encode())
    assert back == rec
    assert back.values.shape == (len(rows), c)
    assert set(np.unique(back.labels)) <= {0, 1}
    assert np.isfinite(back.values).all()
