import pytest

from gogtools import basserre, transplant
from gogtools.mutations import MUTATIONS, TARGETS, mutation
from gogtools.seminorm import NotAConeCycle, beta_map, class_from_dict
from gogtools import instances


def test_every_mutation_names_its_targets():
    assert set(MUTATIONS) == set(TARGETS)


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutation_is_undone(name):
    _, owner, attr, _ = MUTATIONS[name]
    before = getattr(owner, attr)
    with mutation(name):
        assert getattr(owner, attr) is not before
    assert getattr(owner, attr) is before
    assert basserre.candidate_centres is transplant.barycenters.__globals__["candidate_centres"]


def test_cone_sign_breaks_the_inverse_of_beta():
    # the flipped differential still squares to zero; what breaks is that
    # (z, -dz) stops being a cone cycle
    cls = class_from_dict(instances.data_json("simplex2"))
    beta_map(cls.pair, "inverse", cls)
    with mutation("cone-sign"):
        cls.pair.cone().check_square_zero()
        with pytest.raises(NotAConeCycle):
            beta_map(cls.pair, "inverse", cls)
