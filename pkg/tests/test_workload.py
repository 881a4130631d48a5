import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmsched.errors import ConfigurationError, ValidationError, WorkloadParseError
from swarmsched.model import TaskSpec
from swarmsched.workload import (
    WorkloadGenParams,
    dumps_workload,
    generate_workload,
    load_workload,
    loads_workload,
    write_workload,
)


def test_pes_are_powers_of_two_in_range():
    tasks = generate_workload(WorkloadGenParams(task_count=500, rng_seed=3))
    assert {t.pes_required for t in tasks} <= {4, 8, 16, 32, 64, 128, 256}
    assert len({t.pes_required for t in tasks}) == 7


def test_length_scales_with_pes():
    p = WorkloadGenParams(task_count=200, rng_seed=1)
    for t in generate_workload(p):
        assert p.per_pe_length_min * t.pes_required <= t.length <= p.per_pe_length_max * t.pes_required


def test_batches_arrive_together():
    tasks = generate_workload(WorkloadGenParams(task_count=40, batch_min=4, batch_max=4, mean_interarrival=10.0))
    assert sorted({t.submission_time for t in tasks}) == [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0]


def test_exponential_arrivals_sorted():
    tasks = generate_workload(WorkloadGenParams(task_count=60, arrival="exponential", rng_seed=8))
    times = [t.submission_time for t in tasks]
    assert times == sorted(times) and times[-1] > 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"task_count": 0},
        {"pe_exponent_min": 5, "pe_exponent_max": 3},
        {"per_pe_length_min": 0},
        {"arrival": "bursty"},
        {"batch_min": 0},
        {"mean_interarrival": -1},
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(ConfigurationError):
        WorkloadGenParams(**kwargs)


def test_seeded():
    p = WorkloadGenParams(rng_seed=12)
    assert generate_workload(p) == generate_workload(p)


def test_row_format():
    assert loads_workload("id,submit_time,length_mi,pes\n1,0.0,6400,4\n") == [TaskSpec(1, 6400.0, 4, 0.0)]


def test_empty_file(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("")
    assert load_workload(path) == []


def test_negative_length():
    with pytest.raises(ValidationError, match="line 2"):
        loads_workload("id,submit_time,length_mi,pes\n1,0.0,-5,4\n")


def test_malformed_row_reports_line():
    with pytest.raises(WorkloadParseError) as info:
        loads_workload("id,submit_time,length_mi,pes\n1,0.0,10,4\n2,zero,10,4\n")
    assert info.value.line == 3


def test_wrong_field_count():
    with pytest.raises(WorkloadParseError):
        loads_workload("1,0.0,10\n")


def test_duplicate_id():
    with pytest.raises(ValidationError, match="duplicate"):
        loads_workload("1,0.0,10,4\n1,1.0,10,4\n")


def test_sorted_on_load():
    tasks = loads_workload("5,3.0,10,4\n2,1.0,10,4\n9,1.0,10,4\n")
    assert [t.id for t in tasks] == [2, 9, 5]


def test_lf_line_endings(tmp_path):
    path = tmp_path / "w.csv"
    write_workload(generate_workload(WorkloadGenParams(task_count=3)), path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.startswith(b"id,submit_time,length_mi,pes\n")


@settings(max_examples=25)
@given(seed=st.integers(0, 2**64 - 1), n=st.integers(1, 60), arrival=st.sampled_from(["fixed", "exponential"]))
def test_round_trip(seed, n, arrival):
    tasks = generate_workload(WorkloadGenParams(task_count=n, arrival=arrival, rng_seed=seed))
    assert loads_workload(dumps_workload(tasks)) == tasks
