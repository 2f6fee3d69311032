"""
Unit tests for tabular spheromorphisms: validation, evaluation, group operations
"""

import pytest

from src.errors import InvalidSpheromorphismError, NeedMoreDigits
from src.relabel import TailAffineBijection
from src.sphero import (
    NeighborRule,
    PieceMap,
    apply_prefix,
    apply_vertex,
    compose,
    compose_all,
    default_rule,
    ensure_valid,
    equals,
    identity,
    in_stabilizer,
    invert,
    is_automorphism,
    is_identity,
    make_sphero,
    normalize,
    perfect_cuts,
    perfect_forest,
    refine,
    validate,
)
from src.sphero_builders import random_sphero
from src.tree_core import FiniteSubtree


def _broken_e1():
    """E1 with the root relabelling replaced by the identity on k >= 2"""
    pieces = [
        PieceMap(source_apex=(), target_apex=(), rules={
            (): NeighborRule(parent_image=None, child_map=TailAffineBijection.make({}, 2, 0)),
        }),
        PieceMap(source_apex=(1,), target_apex=(1,), rules={
            (1,): NeighborRule(parent_image=None, child_map=TailAffineBijection.make({}, 2, -1)),
        }),
        PieceMap(source_apex=(1, 1), target_apex=(2,)),
    ]
    return make_sphero([(1,), (1, 1)], [(1,), (2,)], pieces)


@pytest.mark.unit
@pytest.mark.sphero
class TestValidate:
    """Test validation of tabular data"""

    def test_e1_is_valid(self, e1_sphero):
        """Test the E1 fixture passes"""
        assert validate(e1_sphero).ok

    def test_identity_is_valid(self):
        """Test the empty table is the identity"""
        assert validate(identity()).ok
        assert is_identity(identity())

    def test_child_image_mismatch(self):
        """Test a relabelling that hits a cut child is reported at the root"""
        report = validate(_broken_e1())
        assert not report.ok
        assert report.vertex == ()
        assert report.diagnostic

    def test_piece_count_mismatch(self):
        """Test one piece for two components is rejected"""
        g = make_sphero([(1,)], [(1,)], [PieceMap(source_apex=(), target_apex=())])
        report = validate(g)
        assert not report.ok
        assert "piece count" in report.diagnostic

    def test_ensure_valid_raises(self):
        """Test ensure_valid turns a failed report into an exception"""
        with pytest.raises(InvalidSpheromorphismError):
            ensure_valid(_broken_e1())


@pytest.mark.unit
@pytest.mark.sphero
class TestApply:
    """Test vertex and prefix evaluation"""

    @pytest.mark.parametrize("v,expected", [
        ((), ()),
        ((3,), (4,)),
        ((2, 7), (3, 7)),
        ((1,), (1,)),
        ((1, 3), (1, 2)),
        ((1, 1), (2,)),
        ((1, 1, 5), (2, 5)),
    ])
    def test_apply_vertex(self, e1_sphero, v, expected):
        """Test E1 on vertices of all three pieces"""
        assert apply_vertex(e1_sphero, v) == expected

    def test_apply_prefix(self, e1_sphero):
        """Test a prefix inside the last piece is mapped like a vertex"""
        assert apply_prefix(e1_sphero, (1, 1, 5)) == (2, 5)
        assert apply_prefix(e1_sphero, (4,)) == (5,)

    def test_apply_prefix_too_short(self, e1_sphero):
        """Test the empty prefix needs two more digits"""
        with pytest.raises(NeedMoreDigits) as info:
            apply_prefix(e1_sphero, ())
        assert info.value.required == 2


@pytest.mark.unit
@pytest.mark.sphero
class TestGroupOps:
    """Test composition, inversion and equality"""

    def test_compose_with_inverse(self, e1_sphero):
        """Test g after g^-1 is the identity"""
        assert is_identity(compose(e1_sphero, invert(e1_sphero)))
        assert is_identity(compose(invert(e1_sphero), e1_sphero))

    def test_inverse_values(self, e1_sphero):
        """Test the inverse undoes E1 on sample vertices"""
        inv = invert(e1_sphero)
        for v in [(), (3,), (1, 3), (1, 1, 5), (2, 2, 2)]:
            assert apply_vertex(inv, apply_vertex(e1_sphero, v)) == v

    def test_compose_pointwise(self, e1_sphero):
        """Test composition agrees with applying twice"""
        gg = compose(e1_sphero, e1_sphero)
        assert validate(gg).ok
        for v in [(), (2,), (1, 2), (1, 1), (1, 1, 1, 4), (5, 1)]:
            assert apply_vertex(gg, v) == apply_vertex(e1_sphero, apply_vertex(e1_sphero, v))

    def test_compose_all(self, e1_sphero):
        """Test the n-fold product with identity factors"""
        g = compose_all(identity(), e1_sphero, identity())
        assert equals(g, e1_sphero)

    def test_equals(self, e1_sphero):
        """Test E1 differs from the identity and equals itself"""
        assert not equals(e1_sphero, identity())
        assert equals(e1_sphero, e1_sphero)

    def test_redundant_rule(self, e1_sphero):
        """Test a rule that repeats the default behaviour changes nothing"""
        root = e1_sphero.pieces[0]
        rules = {**root.rules, (2,): default_rule((2,), e1_sphero.source_cuts)}
        padded = e1_sphero.model_copy(update={"pieces": (root.model_copy(update={"rules": rules}),) + e1_sphero.pieces[1:]})
        assert validate(padded).ok
        assert equals(padded, e1_sphero)
        assert normalize(padded) == e1_sphero

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_random_group_laws(self, seed):
        """Test inverse laws on random elements"""
        g = random_sphero(seed)
        assert validate(g).ok
        assert is_identity(compose(g, invert(g)))
        assert equals(invert(invert(g)), g)


@pytest.mark.unit
@pytest.mark.sphero
class TestPerfectForest:
    """Test the coarsest compatible forest"""

    def test_e1_perfect_forest(self, e1_sphero):
        """Test the cut at (1) is merged away"""
        source, target = perfect_cuts(e1_sphero)
        assert source == frozenset({(1, 1)})
        assert target == frozenset({(2,)})

    def test_perfect_forest_same_map(self, e1_sphero):
        """Test the rebuilt table defines the same map"""
        pf = perfect_forest(e1_sphero)
        assert validate(pf).ok
        for v in [(), (3,), (1, 3), (1, 1, 5)]:
            assert apply_vertex(pf, v) == apply_vertex(e1_sphero, v)

    def test_refine_then_merge(self, e1_sphero):
        """Test refining adds cuts that the perfect forest removes again"""
        finer = refine(e1_sphero, [(2,), (1, 1, 3)])
        assert validate(finer).ok
        assert len(finer.source_cuts) == 4
        assert perfect_cuts(finer) == perfect_cuts(e1_sphero)

    def test_identity_has_no_cuts(self):
        """Test the identity is an automorphism"""
        assert is_automorphism(identity())
        assert perfect_cuts(identity()) == (frozenset(), frozenset())


@pytest.mark.unit
@pytest.mark.sphero
class TestStabilizer:
    """Test membership in pointwise stabilizers"""

    def test_e1_not_in_stabilizer(self, e1_sphero):
        """Test E1 is not an automorphism and so fixes no subtree"""
        assert not in_stabilizer(e1_sphero, FiniteSubtree.of(()))

    def test_identity_in_stabilizer(self, small_subtree):
        """Test the identity fixes every subtree"""
        assert in_stabilizer(identity(), small_subtree)

    def test_translation_not_in_stabilizer(self):
        """Test an automorphism moving eps does not fix {eps}"""
        from src.sphero_builders import build_sphero
        assert not in_stabilizer(build_sphero([], [], [{(): (1,)}]), FiniteSubtree.of(()))
