"""SWC morphology ingestion.

SWC is a whitespace-delimited tabular format with one segment per line::

    id  type  x  y  z  radius  parent

``#`` comment lines and blank lines are skipped.  Field arity is fixed at
exactly 7; anything else is rejected rather than silently truncated, since
downstream consumers are medical pipelines.  The ``type`` column is carried
opaquely: this package reads vessel centerlines stored in SWC, where the
neuron type codes have no defined meaning.

Parsed files are validated into a :class:`SegmentForest`: a single rooted
tree with unique ids, resolvable parents, positive radii, and no cycles.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import (
    CycleDetected,
    DanglingParent,
    DuplicateId,
    MalformedLine,
    MultipleRoots,
    NonPositiveRadius,
    NoRoot,
)

Vec3 = tuple[float, float, float]

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}
_AXIS_TOKEN = re.compile(r"([+-]?)([xyz])")


@dataclass(frozen=True)
class SwcRecord:
    """One morphology segment: a point sample with a parent link."""

    id: int
    type_code: int
    position: Vec3
    radius: float
    parent_id: int


@dataclass(frozen=True)
class AxisConvention:
    """Maps dataset axes onto the canonical patient frame.

    Canonical frame: +x lateral (patient left to right), +y vertical
    (inferior to superior), +z depth (posterior to anterior).  Each field
    names the source axis index (0..2) and sign that supplies the canonical
    component.  Handedness is recorded for provenance but never enforced.
    """

    lateral: tuple[int, int]
    vertical: tuple[int, int]
    depth: tuple[int, int]

    def __post_init__(self):
        axes = {self.lateral[0], self.vertical[0], self.depth[0]}
        if axes != {0, 1, 2}:
            raise ValueError("axis convention must use three distinct axes")
        for _, sign in (self.lateral, self.vertical, self.depth):
            if sign not in (-1, 1):
                raise ValueError("axis signs must be +1 or -1")

    @classmethod
    def from_string(cls, spec: str) -> "AxisConvention":
        """Parse a signed 3-axis string such as ``"+x+y+z"`` or ``"-z+y+x"``.

        Tokens are (lateral, vertical, depth) in order; a missing sign
        means ``+``.
        """
        cleaned = spec.strip().lower()
        tokens = _AXIS_TOKEN.findall(cleaned)
        if len(tokens) != 3 or _AXIS_TOKEN.sub("", cleaned) != "":
            raise ValueError(f"bad axis convention {spec!r}")
        parts = [(_AXIS_INDEX[axis], -1 if sign == "-" else 1) for sign, axis in tokens]
        return cls(lateral=parts[0], vertical=parts[1], depth=parts[2])

    def to_string(self) -> str:
        names = "xyz"
        out = []
        for idx, sign in (self.lateral, self.vertical, self.depth):
            out.append(("-" if sign < 0 else "+") + names[idx])
        return "".join(out)

    @classmethod
    def identity(cls) -> "AxisConvention":
        return cls((0, 1), (1, 1), (2, 1))

    def apply(self, p: Vec3) -> Vec3:
        return (
            self.lateral[1] * p[self.lateral[0]],
            self.vertical[1] * p[self.vertical[0]],
            self.depth[1] * p[self.depth[0]],
        )

    def inverse(self) -> "AxisConvention":
        slots: list[tuple[int, int]] = [(0, 1)] * 3
        for canonical, (src, sign) in enumerate((self.lateral, self.vertical, self.depth)):
            slots[src] = (canonical, sign)
        return AxisConvention(lateral=slots[0], vertical=slots[1], depth=slots[2])

    @property
    def handedness(self) -> str:
        perm = [self.lateral, self.vertical, self.depth]
        # sign of the permutation times the product of axis signs
        parity = 1
        order = [src for src, _ in perm]
        for i in range(3):
            for j in range(i + 1, 3):
                if order[i] > order[j]:
                    parity = -parity
        for _, sign in perm:
            parity *= sign
        return "right" if parity > 0 else "left"


class SegmentForest:
    """A validated, single-rooted SWC tree.

    Records keep their file order.  ``children_index`` lists child ids per
    record, ordered by file position.
    """

    def __init__(self, records: Iterable[SwcRecord]):
        self.records: list[SwcRecord] = list(records)
        self.by_id: dict[int, SwcRecord] = {}
        roots: list[int] = []
        for rec in self.records:
            if rec.id in self.by_id:
                raise DuplicateId(rec.id)
            self.by_id[rec.id] = rec
            if rec.radius <= 0:
                raise NonPositiveRadius(rec.id)
            if rec.parent_id == -1:
                roots.append(rec.id)
        if not roots:
            raise NoRoot()
        if len(roots) > 1:
            raise MultipleRoots(roots)
        self.root_id: int = roots[0]

        self.children_index: dict[int, list[int]] = {rec.id: [] for rec in self.records}
        for rec in self.records:
            if rec.parent_id == -1:
                continue
            if rec.parent_id not in self.by_id:
                raise DanglingParent(rec.id, rec.parent_id)
            self.children_index[rec.parent_id].append(rec.id)

        self._check_acyclic()

    def _check_acyclic(self):
        state: dict[int, int] = {}  # 0 visiting, 1 done
        for rec in self.records:
            path = []
            cur = rec.id
            while cur != -1 and cur not in state:
                state[cur] = 0
                path.append(cur)
                cur = self.by_id[cur].parent_id
            if cur != -1 and state.get(cur) == 0:
                raise CycleDetected(cur)
            for rid in path:
                state[rid] = 1

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, SegmentForest) and self.records == other.records

    def position(self, record_id: int) -> Vec3:
        return self.by_id[record_id].position

    def radius(self, record_id: int) -> float:
        return self.by_id[record_id].radius

    def children(self, record_id: int) -> list[int]:
        return self.children_index[record_id]

    def vertical_extent(self) -> float:
        ys = [r.position[1] for r in self.records]
        return max(ys) - min(ys)


def parse_swc(source: Union[str, bytes, IO]) -> SegmentForest:
    """Parse SWC text into a validated :class:`SegmentForest`.

    ``source`` may be a string, a byte string (decoded as UTF-8 with
    replacement), or a readable file object.  Raises a structured
    :class:`~cerebro.errors.SwcError` subclass on any malformation; never
    returns a partially valid forest.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")

    records: list[SwcRecord] = []
    lines_by_id: dict[int, int] = {}
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 7:
            raise MalformedLine(line_no, f"expected 7 fields, found {len(fields)}")
        try:
            rid = int(fields[0])
            type_code = int(fields[1])
            x, y, z = (float(f) for f in fields[2:5])
            radius = float(fields[5])
            parent = int(fields[6])
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from None
        if not all(math.isfinite(v) for v in (x, y, z, radius)):
            raise MalformedLine(line_no, "non-finite coordinate or radius")
        if rid <= 0:
            raise MalformedLine(line_no, f"record id must be positive, got {rid}")
        if rid in lines_by_id:
            raise DuplicateId(rid, line_no=line_no)
        if radius <= 0:
            raise NonPositiveRadius(rid, line_no=line_no)
        records.append(SwcRecord(rid, type_code, (x, y, z), radius, parent))
        lines_by_id[rid] = line_no

    try:
        return SegmentForest(records)
    except DanglingParent as exc:
        raise DanglingParent(
            exc.record_id, exc.parent_id, line_no=lines_by_id.get(exc.record_id)
        ) from None
    except CycleDetected as exc:
        raise CycleDetected(exc.record_id, line_no=lines_by_id.get(exc.record_id)) from None


def serialize_swc(forest: SegmentForest, header: str | None = None) -> str:
    """Write a forest back to SWC text.

    Floats use ``repr`` formatting, so a parse round trip reproduces the
    forest exactly.
    """
    lines = []
    if header:
        for h in header.splitlines():
            lines.append(f"# {h}")
    for rec in forest.records:
        x, y, z = rec.position
        lines.append(
            f"{rec.id} {rec.type_code} {x!r} {y!r} {z!r} {rec.radius!r} {rec.parent_id}"
        )
    return "\n".join(lines) + "\n"


def apply_axis_map(forest: SegmentForest, conv: AxisConvention) -> SegmentForest:
    """Remap every position into the canonical frame; topology and radii untouched."""
    remapped = [
        SwcRecord(r.id, r.type_code, conv.apply(r.position), r.radius, r.parent_id)
        for r in forest.records
    ]
    return SegmentForest(remapped)
