"""Deliberate faults for checking that the acceptance suite can fail.

Each fixture is a context manager that swaps one internal function for a
subtly wrong version and restores it on exit.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from unittest import mock

from . import basserre, transplant
from .seminorm import complexes

__all__ = ["MUTATIONS", "mutation", "TARGETS"]


def _centres_interior_only(points):
    # forgets that an entry of the tuple may itself be the barycenter
    out = set()
    pts = list(dict.fromkeys(points))
    for i, a in enumerate(pts):
        for b in pts[i + 1 :]:
            out.update(n for n in basserre.geodesic(a, b)[1:-1] if not n.is_edge)
    return out


def _no_sign(perm) -> int:
    return 1


def _cone_d_flipped(self, cell) -> dict:
    kind, c = cell
    X = self.pair.X
    out = {}
    if kind == "X":
        for f, v in X.d(c).items():
            out[("X", f)] = v
    else:
        out[("X", c)] = Fraction(-1)
        for f, v in X.d(c).items():
            out[("Y", f)] = -v
    return out


MUTATIONS = {
    "barycenter": ("candidate centres omit the entries of the tuple", basserre, "candidate_centres", _centres_interior_only),
    "alternation": ("permutation sign dropped from alternating cochains", transplant, "_perm_sign", _no_sign),
    "cone-sign": ("wrong sign on the inclusion term of the cone differential", complexes.MappingCone, "d_cell", _cone_d_flipped),
}

# criteria each fault is expected to trip
TARGETS = {"barycenter": (3, 2), "alternation": (2, 3), "cone-sign": (6,)}


@contextlib.contextmanager
def mutation(name: str):
    if name not in MUTATIONS:
        raise KeyError(f"unknown mutation {name!r}; choose from {', '.join(MUTATIONS)}")
    _, owner, attr, replacement = MUTATIONS[name]
    with mock.patch.object(owner, attr, replacement):
        if owner is basserre:
            # transplant imported the name directly
            with mock.patch.object(transplant, attr, replacement):
                yield
        else:
            yield
