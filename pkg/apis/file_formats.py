"""
Line-oriented instance and solution files.

Instance::

    # polyg-instance v1
    name <name>
    <id> <x> <y>

Solution::

    # polyg-solution v1
    instance <name>
    objective <max|min>
    score <float>
    <id>

Blank lines and further ``#`` lines are ignored. An instance file without the
header is read as a plain ``id x y`` point list named after the file.
"""
import logging
from pathlib import Path
from typing import Iterator, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from models.errors import InputError
from models.instance import Instance, Objective
from models.polygon import Polygon
from models.reports import ScoreReport

logger = logging.getLogger(__name__)

INSTANCE_HEADER = "# polyg-instance v1"
SOLUTION_HEADER = "# polyg-solution v1"

PathLike = Union[str, Path]


class SolutionFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    instance: str
    objective: Objective
    score: float
    cycle: Tuple[int, ...]


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _int(token: str, number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"line {number}: expected an integer, got {token!r}") from None


def _build_instance(name: str, rows: List[Tuple[int, int, int, int]]) -> Instance:
    for position, (number, pid, _, _) in enumerate(rows):
        if pid != position:
            raise InputError(f"line {number}: expected point id {position}, got {pid}")
    try:
        return Instance.from_coordinates(name, [(x, y) for _, _, x, y in rows])
    except ValidationError as exc:
        raise InputError(f"invalid instance {name!r}: {exc.errors()[0]['msg']}") from exc


def parse_instance(text: str, default_name: str = "instance") -> Instance:
    first = text.lstrip().splitlines()[0].strip() if text.strip() else ""
    versioned = first == INSTANCE_HEADER
    if not versioned and first.startswith("# polyg-instance"):
        raise InputError(f"unsupported instance format {first!r}")
    name = default_name
    rows: List[Tuple[int, int, int, int]] = []
    for number, line in _lines(text):
        tokens = line.split()
        if versioned and tokens[0] == "name":
            if len(tokens) != 2 or rows:
                raise InputError(f"line {number}: malformed name record")
            name = tokens[1]
            continue
        if len(tokens) != 3:
            raise InputError(f"line {number}: expected 'id x y', got {line!r}")
        rows.append((number, *(_int(t, number) for t in tokens)))
    return _build_instance(name, rows)


def serialize_instance(instance: Instance) -> str:
    lines = [INSTANCE_HEADER, f"name {instance.name}"]
    lines.extend(f"{p.id} {p.x} {p.y}" for p in instance.points)
    return "\n".join(lines) + "\n"


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not UTF-8 text (byte {exc.start})") from exc


def read_instance(path: PathLike) -> Instance:
    path = Path(path)
    text = _read_text(path)
    try:
        instance = parse_instance(text, default_name=path.stem)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    logger.debug("Read %s: %d points", path, instance.n)
    return instance


def write_instance(instance: Instance, path: PathLike) -> None:
    Path(path).write_text(serialize_instance(instance), encoding="utf-8")


def parse_solution(text: str) -> SolutionFile:
    lines = list(_lines(text))
    if not text.strip() or text.lstrip().splitlines()[0].strip() != SOLUTION_HEADER:
        raise InputError(f"solution must start with {SOLUTION_HEADER!r}")
    fields = {}
    cycle: List[int] = []
    for number, line in lines:
        tokens = line.split()
        if tokens[0] in ("instance", "objective", "score"):
            if len(tokens) != 2 or cycle or tokens[0] in fields:
                raise InputError(f"line {number}: malformed {tokens[0]} record")
            fields[tokens[0]] = tokens[1]
            continue
        if len(tokens) != 1:
            raise InputError(f"line {number}: expected a single vertex id, got {line!r}")
        cycle.append(_int(tokens[0], number))
    missing = [key for key in ("instance", "objective", "score") if key not in fields]
    if missing:
        raise InputError(f"solution is missing {', '.join(missing)}")
    try:
        return SolutionFile(instance=fields["instance"], objective=fields["objective"],
                            score=fields["score"], cycle=tuple(cycle))
    except ValidationError as exc:
        raise InputError(f"invalid solution header: {exc.errors()[0]['msg']}") from exc


def serialize_solution(solution: SolutionFile) -> str:
    lines = [
        SOLUTION_HEADER,
        f"instance {solution.instance}",
        f"objective {solution.objective.value}",
        f"score {solution.score!r}",
    ]
    lines.extend(str(v) for v in solution.cycle)
    return "\n".join(lines) + "\n"


def read_solution(path: PathLike) -> SolutionFile:
    path = Path(path)
    text = _read_text(path)
    try:
        return parse_solution(text)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_solution(solution: SolutionFile, path: PathLike) -> None:
    Path(path).write_text(serialize_solution(solution), encoding="utf-8")


def make_solution(instance: Instance, polygon: Polygon, objective: Objective, report: ScoreReport) -> SolutionFile:
    return SolutionFile(instance=instance.name, objective=objective, score=report.score,
                        cycle=tuple(polygon.vertices()))
