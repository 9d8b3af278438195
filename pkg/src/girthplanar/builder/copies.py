"""Template copies placed into host faces: slot -> vertex bookkeeping."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..gadgets import GadgetTemplate, PathStep
from ..planar import RotationMap


class TemplateCopy:
    """One copy of a template whose boundary sits on a host face walk."""

    def __init__(self, template: GadgetTemplate, boundary: Sequence[int]):
        if len(boundary) != len(template.boundary):
            raise ValueError("boundary length does not match the template")
        self.template = template
        self.slot = np.full(template.vertex_count, -1, dtype=np.int64)
        self.slot[list(template.boundary)] = boundary

    def anchors(self, step: PathStep) -> tuple[int, int]:
        return int(self.slot[step.start]), int(self.slot[step.end])

    def face(self, rmap: RotationMap, step: PathStep) -> int:
        return rmap.face_of(int(self.slot[step.start]), int(self.slot[step.via]))

    def path(self, step: PathStep) -> list[int]:
        out = [int(self.slot[s]) for s in step.slots]
        if min(out) < 0:
            raise AssertionError("step replayed before its slots were filled")
        return out

    def fill(self, step: PathStep, interior: Sequence[int]) -> None:
        self.slot[list(step.interior)] = interior

    def recursion_faces(self, rmap: RotationMap) -> list[int]:
        out = []
        for walk in self.template.recursion_faces:
            fid = rmap.face_of(int(self.slot[walk[0]]), int(self.slot[walk[1]]))
            if set(rmap.face_walk(fid)) != {int(self.slot[v]) for v in walk}:
                raise AssertionError("recursion face drifted from the template")
            out.append(fid)
        return out
