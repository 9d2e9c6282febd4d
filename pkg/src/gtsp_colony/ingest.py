"""TSPLIB / GTSP-LIB file handling, clustering and random instance generation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError
from .model import Instance

SUPPORTED_WEIGHT_TYPES = ("EUC_2D",)


@dataclass(frozen=True)
class NodeSet:
    name: str
    coords: tuple[tuple[float, float], ...]
    edge_weight_type: str = "EUC_2D"

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Clustering:
    assignment: tuple[int, ...]
    centers: tuple[int, ...]

    def clusters(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in self.centers]
        for node, k in enumerate(self.assignment):
            groups[k].append(node)
        return groups


def nint(x: float) -> int:
    """TSPLIB nearest integer: round half up."""
    return int(math.floor(x + 0.5))


def euc_2d(a, b) -> int:
    return nint(math.hypot(a[0] - b[0], a[1] - b[1]))


def euc_2d_matrix(coords) -> np.ndarray:
    xy = np.asarray(coords, dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.floor(np.hypot(diff[..., 0], diff[..., 1]) + 0.5)


# -- TSPLIB header/section reading -------------------------------------------

def _split_keyword(line: str):
    if ":" in line:
        key, _, value = line.partition(":")
        return key.strip().upper(), value.strip()
    parts = line.split(None, 1)
    return parts[0].upper(), (parts[1].strip() if len(parts) > 1 else "")


_SECTIONS = {
    "NODE_COORD_SECTION",
    "GTSP_SET_SECTION",
    "EDGE_WEIGHT_SECTION",
    "DISPLAY_DATA_SECTION",
    "EOF",
}


class _Reader:
    """Line cursor over TSPLIB text that remembers 1-based line numbers."""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next_nonblank(self):
        while self.pos < len(self.lines):
            raw = self.lines[self.pos]
            self.pos += 1
            if raw.strip():
                return self.pos, raw.strip()
        return None, None

    def peek_nonblank(self):
        save = self.pos
        lineno, line = self.next_nonblank()
        self.pos = save
        return lineno, line


def _is_section(line: str) -> bool:
    key, _ = _split_keyword(line)
    return key in _SECTIONS


def _read_header(reader: _Reader):
    header = {}
    while True:
        lineno, line = reader.peek_nonblank()
        if line is None or _is_section(line):
            return header
        reader.next_nonblank()
        key, value = _split_keyword(line)
        header[key] = (value, lineno)


def _read_dimension(header) -> int:
    if "DIMENSION" not in header:
        raise ParseError("missing DIMENSION")
    value, lineno = header["DIMENSION"]
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"bad DIMENSION value {value!r}", lineno) from None
    if n < 1:
        raise ParseError(f"DIMENSION must be positive, got {n}", lineno)
    return n


def _read_coords(reader: _Reader, n: int):
    coords: list[tuple[float, float] | None] = [None] * n
    count = 0
    while count < n:
        lineno, line = reader.next_nonblank()
        if line is None or _is_section(line):
            raise ParseError(f"expected {n} coordinate lines, found {count}", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"malformed coordinate line {line!r}", lineno)
        try:
            node = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"malformed coordinate line {line!r}", lineno) from None
        if not 1 <= node <= n:
            raise ParseError(f"node id {node} outside 1..{n}", lineno)
        if coords[node - 1] is not None:
            raise ParseError(f"duplicate coordinates for node {node}", lineno)
        coords[node - 1] = (x, y)
        count += 1
    return tuple(coords)  # type: ignore[arg-type]


def _read_weight_matrix(reader: _Reader, n: int, fmt: str):
    if fmt != "FULL_MATRIX":
        raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}")
    values: list[float] = []
    while len(values) < n * n:
        lineno, line = reader.next_nonblank()
        if line is None or _is_section(line):
            raise ParseError(f"expected {n * n} edge weights, found {len(values)}", lineno)
        try:
            values.extend(float(tok) for tok in line.split())
        except ValueError:
            raise ParseError(f"malformed weight line {line!r}", lineno) from None
    if len(values) != n * n:
        raise ParseError(f"expected {n * n} edge weights, found {len(values)}")
    return np.array(values).reshape(n, n)


def parse_tsplib(text: str) -> NodeSet:
    """Parse a TSPLIB95 ``.tsp`` file with EUC_2D node coordinates."""
    reader = _Reader(text)
    header = _read_header(reader)
    n = _read_dimension(header)
    ewt, ewt_line = header.get("EDGE_WEIGHT_TYPE", ("", None))
    if ewt.upper() not in SUPPORTED_WEIGHT_TYPES:
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}", ewt_line)
    name = header.get("NAME", ("", None))[0]
    coords = None
    while True:
        lineno, line = reader.next_nonblank()
        if line is None:
            break
        key, _ = _split_keyword(line)
        if key == "EOF":
            break
        if key == "NODE_COORD_SECTION":
            coords = _read_coords(reader, n)
        else:
            raise ParseError(f"unexpected section {key}", lineno)
    if coords is None:
        raise ParseError("missing NODE_COORD_SECTION")
    return NodeSet(name=name, coords=coords, edge_weight_type=ewt.upper())


def read_tsplib(path) -> NodeSet:
    return parse_tsplib(Path(path).read_text())


# -- clustering ----------------------------------------------------------------

def default_cluster_count(n: int, ratio: float = 5) -> int:
    return max(3, math.ceil(n / ratio))


def cluster_fischetti(nodes: NodeSet, nc: int) -> Clustering:
    """Center-based partition into ``nc`` clusters.

    Centers are chosen by farthest-point dispersion starting from the node
    farthest from the centroid; every other node joins its nearest center.
    Ties go to the lower node id.
    """
    n = nodes.dimension
    if not 1 <= nc <= n:
        raise InputError(f"cluster count must satisfy 1 <= nc <= {n}, got {nc}")
    xy = np.asarray(nodes.coords, dtype=np.float64)
    centroid = xy.mean(axis=0)
    # np.argmax returns the first maximum, i.e. the lowest node id on ties.
    first = int(np.argmax(np.hypot(*(xy - centroid).T)))
    centers = [first]
    is_center = np.zeros(n, dtype=bool)
    is_center[first] = True
    nearest = np.hypot(*(xy - xy[first]).T)
    while len(centers) < nc:
        gap = np.where(is_center, -1.0, nearest)
        nxt = int(np.argmax(gap))
        centers.append(nxt)
        is_center[nxt] = True
        nearest = np.minimum(nearest, np.hypot(*(xy - xy[nxt]).T))

    center_xy = xy[centers]
    dist = np.hypot(
        xy[:, None, 0] - center_xy[None, :, 0], xy[:, None, 1] - center_xy[None, :, 1]
    )
    # break distance ties by lower center node id, not by selection order
    order = np.argsort(centers, kind="stable")
    assignment = order[np.argmin(dist[:, order], axis=1)]
    for k, c in enumerate(centers):
        assignment[c] = k
    return Clustering(tuple(int(a) for a in assignment), tuple(centers))


def instance_from_nodeset(nodes: NodeSet, nc: int | None = None, name: str | None = None) -> Instance:
    nc = default_cluster_count(nodes.dimension) if nc is None else nc
    if nc < 3:
        raise InputError(f"an E-GTSP instance needs at least 3 clusters, got {nc}")
    clustering = cluster_fischetti(nodes, nc)
    if name is None:
        name = f"{nc}{nodes.name}"
    return Instance(name, euc_2d_matrix(nodes.coords), clustering.clusters(), nodes.coords)


# -- GTSP files ----------------------------------------------------------------

def parse_gtsp_instance(text: str) -> Instance:
    """Parse a GTSP-LIB style file (TSPLIB header + GTSP_SET_SECTION)."""
    reader = _Reader(text)
    header = _read_header(reader)
    n = _read_dimension(header)
    if "GTSP_SETS" not in header:
        raise ParseError("missing GTSP_SETS")
    sets_value, sets_line = header["GTSP_SETS"]
    try:
        p = int(sets_value)
    except ValueError:
        raise ParseError(f"bad GTSP_SETS value {sets_value!r}", sets_line) from None
    ewt, ewt_line = header.get("EDGE_WEIGHT_TYPE", ("", None))
    ewt = ewt.upper()
    if ewt not in SUPPORTED_WEIGHT_TYPES + ("EXPLICIT",):
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r}", ewt_line)
    name = header.get("NAME", ("", None))[0]

    coords = None
    matrix = None
    sets: dict[int, list[int]] = {}
    while True:
        lineno, line = reader.next_nonblank()
        if line is None:
            break
        key, _ = _split_keyword(line)
        if key == "EOF":
            break
        if key == "NODE_COORD_SECTION":
            coords = _read_coords(reader, n)
        elif key == "EDGE_WEIGHT_SECTION":
            fmt = header.get("EDGE_WEIGHT_FORMAT", ("", None))[0].upper()
            matrix = _read_weight_matrix(reader, n, fmt)
        elif key == "GTSP_SET_SECTION":
            sets = _read_sets(reader, n, p)
        else:
            raise ParseError(f"unexpected section {key}", lineno)

    if len(sets) != p:
        raise ParseError(f"GTSP_SETS declares {p} sets but {len(sets)} were listed", sets_line)
    if ewt == "EUC_2D":
        if coords is None:
            raise ParseError("EUC_2D instance without NODE_COORD_SECTION")
        matrix = euc_2d_matrix(coords)
    elif matrix is None:
        raise ParseError("EXPLICIT instance without EDGE_WEIGHT_SECTION")
    clusters = [sets[k] for k in sorted(sets)]
    try:
        return Instance(name, matrix, clusters, coords)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def _read_sets(reader: _Reader, n: int, p: int) -> dict[int, list[int]]:
    sets: dict[int, list[int]] = {}
    owner: dict[int, int] = {}
    current: list[int] | None = None
    set_id = None
    while True:
        lineno, line = reader.peek_nonblank()
        if line is None or _is_section(line):
            if current is not None:
                raise ParseError(f"set {set_id} not terminated by -1", lineno)
            break
        reader.next_nonblank()
        for tok in line.split():
            try:
                value = int(tok)
            except ValueError:
                raise ParseError(f"bad token {tok!r} in GTSP_SET_SECTION", lineno) from None
            if current is None:
                set_id = value
                if set_id in sets:
                    raise ParseError(f"set {set_id} listed twice", lineno)
                current = []
            elif value == -1:
                if not current:
                    raise ParseError(f"set {set_id} is empty", lineno)
                sets[set_id] = current
                current = None
            else:
                if not 1 <= value <= n:
                    raise ParseError(f"node {value} outside 1..{n}", lineno)
                if value in owner:
                    raise ParseError(
                        f"node {value} in sets {owner[value]} and {set_id}", lineno
                    )
                owner[value] = set_id  # type: ignore[assignment]
                current.append(value - 1)
    unassigned = sorted(set(range(1, n + 1)) - owner.keys())
    if unassigned:
        raise ParseError(f"nodes not assigned to any set: {unassigned[:10]}")
    return sets


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_gtsp_instance(instance: Instance) -> str:
    """Serialise ``instance``; coordinates are written when they reproduce the costs."""
    lines = [
        f"NAME: {instance.name}",
        "TYPE: GTSP",
        f"DIMENSION: {instance.n}",
        f"GTSP_SETS: {instance.p}",
    ]
    euclidean = instance.coords is not None and np.array_equal(
        euc_2d_matrix(instance.coords), instance.costs
    )
    if euclidean:
        lines.append("EDGE_WEIGHT_TYPE: EUC_2D")
        lines.append("NODE_COORD_SECTION")
        for i, (x, y) in enumerate(instance.coords):
            lines.append(f"{i + 1} {_fmt_number(x)} {_fmt_number(y)}")
    else:
        lines.append("EDGE_WEIGHT_TYPE: EXPLICIT")
        lines.append("EDGE_WEIGHT_FORMAT: FULL_MATRIX")
        lines.append("EDGE_WEIGHT_SECTION")
        for row in instance.costs:
            lines.append(" ".join(_fmt_number(v) for v in row))
    lines.append("GTSP_SET_SECTION")
    for k, group in enumerate(instance.clusters):
        lines.append(" ".join([str(k + 1), *(str(v + 1) for v in group), "-1"]))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def read_instance(path) -> Instance:
    return parse_gtsp_instance(Path(path).read_text())


def generate_random_instance(seed: int, p: int, n: int, extent: int = 1000) -> Instance:
    """Uniform integer points in ``[0, extent]^2``, EUC_2D costs, ``p`` clusters."""
    if p < 3:
        raise InputError(f"need p >= 3, got {p}")
    if p > n:
        raise InputError(f"cluster count {p} exceeds node count {n}")
    rng = np.random.default_rng(seed)
    xy = rng.integers(0, extent + 1, size=(n, 2))
    nodes = NodeSet(
        name=f"rand{n}s{seed}",
        coords=tuple((float(x), float(y)) for x, y in xy),
    )
    return instance_from_nodeset(nodes, p)
