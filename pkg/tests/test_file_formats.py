import random

import pytest

from apis.file_formats import (
    INSTANCE_HEADER,
    SOLUTION_HEADER,
    SolutionFile,
    parse_instance,
    parse_solution,
    read_instance,
    read_solution,
    serialize_instance,
    serialize_solution,
    write_instance,
    write_solution,
)
from models.errors import InputError
from models.instance import Objective


def test_instance_file_round_trip(tmp_path, square_center):
    path = tmp_path / "sq.txt"
    write_instance(square_center, path)
    text = path.read_text()
    assert text.splitlines()[:3] == [INSTANCE_HEADER, "name square-center", "0 0 0"]
    assert read_instance(path) == square_center


def test_headerless_point_list_takes_file_stem(tmp_path):
    path = tmp_path / "plain.txt"
    path.write_text("0 1 2\n1 5 -3\n\n2 -7 4\n")
    instance = read_instance(path)
    assert instance.name == "plain"
    assert instance.xs == [1, 5, -7] and instance.ys == [2, -3, 4]


@pytest.mark.parametrize("body, message", [
    ("0 0 0\n2 1 0\n1 0 1\n", "expected point id 1"),
    ("0 0 0\n1 1 0\n2 0 x\n", "expected an integer"),
    ("0 0 0\n1 1 0\n2 0\n", "expected 'id x y'"),
    ("0 0 0\n1 1 0\n2 0 0\n", "coincide"),
    ("0 0 0\n1 1 0\n", "at least 3 points"),
])
def test_bad_instances_raise_input_error(body, message):
    with pytest.raises(InputError, match=message):
        parse_instance(f"{INSTANCE_HEADER}\nname bad\n{body}")


def test_unknown_instance_version_is_rejected():
    with pytest.raises(InputError):
        parse_instance("# polyg-instance v9\nname x\n0 0 0\n1 1 0\n2 0 1\n")


def test_missing_file_is_an_input_error(tmp_path):
    with pytest.raises(InputError):
        read_instance(tmp_path / "absent.txt")


def test_solution_file_round_trip(tmp_path):
    solution = SolutionFile(instance="square-center", objective=Objective.MIN, score=0.75, cycle=(0, 4, 1, 2, 3))
    path = tmp_path / "sol.txt"
    write_solution(solution, path)
    assert path.read_text().splitlines()[:4] == [SOLUTION_HEADER, "instance square-center", "objective min",
                                                  "score 0.75"]
    assert read_solution(path) == solution


def test_score_is_written_exactly():
    solution = SolutionFile(instance="t", objective=Objective.MAX, score=0.1 + 0.2, cycle=(0, 1, 2))
    assert parse_solution(serialize_solution(solution)).score == 0.1 + 0.2


@pytest.mark.parametrize("text", [
    "instance a\nobjective max\nscore 1.0\n0\n1\n2\n",
    f"{SOLUTION_HEADER}\ninstance a\nscore 1.0\n0\n1\n2\n",
    f"{SOLUTION_HEADER}\ninstance a\nobjective max\n0\n1\n2\n",
    f"{SOLUTION_HEADER}\ninstance a\nobjective sideways\nscore 1.0\n0\n1\n2\n",
    f"{SOLUTION_HEADER}\ninstance a\nobjective max\nscore 1.0\n0\n1 2\n",
    f"{SOLUTION_HEADER}\ninstance a\nobjective max\nscore 1.0\n0\nx\n",
    "",
])
def test_malformed_solutions_raise_input_error(text):
    with pytest.raises(InputError):
        parse_solution(text)


def test_serialized_instance_parses_back(random_instance):
    instance = random_instance(25, seed=8, name="r25")
    assert parse_instance(serialize_instance(instance)) == instance


@pytest.mark.parametrize("reader", [read_instance, read_solution])
def test_undecodable_file_is_an_input_error(tmp_path, reader):
    path = tmp_path / "latin1.txt"
    path.write_bytes(b"# polyg-instance v1\nname caf\xe9\n0 0 0\n1 1 0\n2 0 1\n")
    with pytest.raises(InputError, match="not UTF-8"):
        reader(path)


def test_value_errors_from_parsing_become_input_errors(tmp_path, monkeypatch):
    path = tmp_path / "sol.txt"
    path.write_text("anything\n")

    def broken(text):
        raise ValueError("bad score")

    monkeypatch.setattr("apis.file_formats.parse_solution", broken)
    with pytest.raises(InputError, match="bad score"):
        read_solution(path)


def test_random_files_survive_write_and_read(tmp_path, random_instance):
    rng = random.Random(31)
    for trial in range(25):
        n = rng.randint(3, 60)
        instance = random_instance(n, seed=trial, extent=rng.choice([10, 10_000, 2 ** 30]), name=f"fuzz-{trial}")
        instance_path = tmp_path / f"i{trial}.txt"
        write_instance(instance, instance_path)
        assert read_instance(instance_path) == instance

        cycle = list(range(n))
        rng.shuffle(cycle)
        solution = SolutionFile(instance=instance.name, objective=rng.choice(list(Objective)),
                                score=rng.random(), cycle=tuple(cycle))
        solution_path = tmp_path / f"s{trial}.txt"
        write_solution(solution, solution_path)
        assert read_solution(solution_path) == solution
