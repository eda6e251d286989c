import pytest

from models.errors import UnificationFailure
from dsl.signatures import SIGNATURES, instantiate
from dsl.types import (
    ARITHMETIC, BOOL, COMPARABLE, EMPTY, INT, LOC, REGION,
    Concrete, FunctionOf, ListOf, PairOf, UnionOf, Var, free_vars, fresh_var, is_ground, iter_vars, resolve,
    type_key, unifies, unify,
)


def test_concrete_names_are_closed():
    with pytest.raises(ValueError):
        Concrete("Float")


def test_variable_binds_to_concrete():
    a = fresh_var()
    s = unify(ListOf(a), ListOf(INT))
    assert resolve(a, s) == INT


def test_unify_does_not_mutate_substitution():
    a = fresh_var()
    s = unify(a, REGION)
    assert len(EMPTY) == 0
    s2 = unify(fresh_var(), INT, s)
    assert len(s) == 1
    assert len(s2) == 2


def test_occurs_check():
    a = fresh_var()
    with pytest.raises(UnificationFailure):
        unify(a, ListOf(a))


def test_structural_mismatch():
    assert not unifies(ListOf(INT), PairOf(INT, INT))
    assert not unifies(FunctionOf(INT, BOOL), FunctionOf(BOOL, BOOL))
    assert unifies(PairOf(fresh_var(), BOOL), PairOf(REGION, fresh_var()))


def test_constraints():
    assert unifies(fresh_var(ARITHMETIC), LOC)
    assert unifies(fresh_var(ARITHMETIC), INT)
    assert not unifies(fresh_var(ARITHMETIC), BOOL)
    assert not unifies(fresh_var(COMPARABLE), LOC)


def test_constrained_variables_meet_at_common_member():
    a, b = fresh_var(ARITHMETIC), fresh_var(COMPARABLE)
    s = unify(a, b)
    assert resolve(a, s) == INT
    assert resolve(b, s) == INT


def _type_pool():
    x = fresh_var()
    return [
        INT, BOOL, LOC, REGION,
        ListOf(INT), ListOf(fresh_var()),
        PairOf(fresh_var(), BOOL), PairOf(INT, fresh_var()),
        FunctionOf(fresh_var(), INT), FunctionOf(REGION, fresh_var()),
        fresh_var(), fresh_var(ARITHMETIC), fresh_var(COMPARABLE),
        ListOf(fresh_var(ARITHMETIC)), PairOf(x, x),
        UnionOf((INT, BOOL)),
    ]


def _has_union(t):
    if isinstance(t, UnionOf):
        return True
    if isinstance(t, ListOf):
        return _has_union(t.elem)
    if isinstance(t, PairOf):
        return _has_union(t.first) or _has_union(t.second)
    if isinstance(t, FunctionOf):
        return _has_union(t.arg) or _has_union(t.ret)
    return False


def test_unification_is_symmetric():
    pool = _type_pool()
    assert len(pool) == 16
    for a in pool:
        for b in pool:
            assert unifies(a, b) == unifies(b, a), (a, b)
            if unifies(a, b) and not (_has_union(a) or _has_union(b)):
                s = unify(a, b)
                assert resolve(a, s) == resolve(b, s), (a, b)


def test_constraint_intersection_in_either_order():
    for first, second in ((ARITHMETIC, COMPARABLE), (COMPARABLE, ARITHMETIC)):
        a, b = fresh_var(first), fresh_var(second)
        s = unify(a, b)
        assert resolve(a, s) == resolve(b, s) == INT


def test_instantiation_is_fresh_every_time():
    assert len(SIGNATURES) == 40
    for sig in SIGNATURES:
        ids = []
        for inst in (instantiate(sig), instantiate(sig)):
            ids.append({v.id for t in inst.params + (inst.ret,) for v in iter_vars(t)})
        assert ids[0].isdisjoint(ids[1]), sig.name
        assert len(ids[0]) == len(ids[1])


def test_union_matches_any_member():
    u = UnionOf((INT, BOOL))
    assert unifies(u, BOOL)
    assert not unifies(u, REGION)
    with pytest.raises(ValueError):
        UnionOf((INT, INT))


def test_free_vars_and_ground():
    a = fresh_var()
    t = PairOf(a, ListOf(INT))
    assert free_vars(t) == {a.id}
    assert not is_ground(t)
    assert is_ground(resolve(t, unify(a, BOOL)))


def test_type_key_renames_by_first_appearance():
    a, b = Var(1001), Var(1002, COMPARABLE)
    assert type_key(FunctionOf(b, ListOf(a))) == "(A:Comparable -> List[B])"
    assert type_key(PairOf(a, a)) == "Pair[A, A]"
