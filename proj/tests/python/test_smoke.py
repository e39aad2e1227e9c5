from fractions import Fraction
from pathlib import Path

import pytest

railq = pytest.importorskip("railq")

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(scope="module")
def simple():
    return railq.Instance.load(str(DATA / "simple_2train.json"))


@pytest.fixture(scope="module")
def line216():
    return railq.Instance.load(str(DATA / "line216.json"))


def test_simple_matrix_and_energies(simple):
    q = railq.build_qubo(simple, Fraction(7, 4), Fraction(7, 4))
    m = q.matrix()
    assert m[0] == [Fraction(-7, 4), Fraction(7, 4), Fraction(7, 4), 0]
    assert m[3][3] == Fraction(-3, 4)
    assert q.energy([0, 1, 1, 0]) == -3
    assert q.energy([1, 0, 0, 1]) == Fraction(-5, 2)
    assert q.decode([0, 1, 1, 0]) == [[2], [1]]
    assert q.decode([1, 1, 0, 0]) is None
    assert q.encode([[2], [1]]) == [0, 1, 1, 0]


def test_ising_offset(simple):
    q = railq.build_qubo(simple)
    h, J, offset = q.ising()
    for m in range(16):
        x = [(m >> i) & 1 for i in range(4)]
        s = [2 * b - 1 for b in x]
        e = sum(hi * si for hi, si in zip(h, s)) + sum(v * s[i] * s[j] for (i, j), v in J.items())
        assert e - q.energy(x) == offset


def test_line216_ground_state(line216):
    q = railq.build_qubo(line216)
    assert q.size == 48
    [(energy, states)] = railq.spectrum(q)
    assert energy == Fraction(-21, 2) + Fraction(17, 14)
    assert len(states) == 4
    exact = railq.solve_reference(line216, "exact")
    for x in states:
        delays = q.decode(x)
        assert railq.check(line216, delays)[0]
        assert railq.equivalent(line216, delays, exact["delays"])
        assert railq.objective(line216, delays) == Fraction(17, 14)


def test_reference_methods(line216):
    for method in ("fcfs", "flfs", "amcc"):
        r = railq.solve_reference(line216, method)
        assert r["feasible"]
        assert r["max_secondary_delay"] == 4
        assert r["sum_final_secondary_delay"] == 7
    with pytest.raises(ValueError):
        railq.solve_reference(line216, "nope")


def test_anneal_simple(simple):
    q = railq.build_qubo(simple)
    reads = railq.anneal(q, num_reads=50, sweeps=200, seed=4)
    state, energy, count = reads[0]
    assert state == [0, 1, 1, 0] and energy == -3
    assert sum(r[2] for r in reads) == 50


def test_errors(simple):
    with pytest.raises(railq.ModelError):
        railq.Instance.from_json("{}")
    with pytest.raises(railq.CapacityError):
        railq.spectrum(railq.build_qubo(railq.Instance.load(str(DATA / "line191_case1.json"))))
    with pytest.raises(railq.ParameterError):
        railq.anneal(railq.build_qubo(simple), num_reads=0)
