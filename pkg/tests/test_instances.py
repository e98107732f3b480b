import json

import pytest

from cosetlab.groups import (CyclicElement, close_under_op, cyclic_group,
                             dihedral_group, element_key, group_op,
                             symmetric_group)
from cosetlab.instances import (GhshInstance, GroupAction, HspInstance,
                                NoDisjointOrbitError, OracleFunction,
                                PromiseViolationError, Side, instance_from_json,
                                instance_to_json, plant_coset, plant_ghsh,
                                plant_hsp, plant_orbit_coset, verify_promise)
from cosetlab.perms import parse_cycles


def keys(elems):
    return {element_key(g) for g in elems}


def subgroup_list(group):
    """All distinct subgroups reachable from two generators."""
    elems = group.elements()
    seen = {}
    for a in elems:
        for b in elems:
            closure = close_under_op([a, b], group.identity)
            seen.setdefault(tuple(sorted(keys(closure))), (a, b))
    return list(seen.values())


def test_plant_hsp_s3_examples():
    s3 = symmetric_group(3)
    swap = parse_cycles("(1 2)", 3)
    inst = plant_hsp(s3, (swap,), Side.LEFT)
    labels = {inst.oracle.evaluate(g) for g in s3.elements()}
    assert len(labels) == 3
    assert inst.oracle.evaluate(swap) == inst.oracle.evaluate(s3.identity)

    full = plant_hsp(s3, tuple(s3.generators), Side.LEFT)
    assert len({full.oracle.evaluate(g) for g in s3.elements()}) == 1

    trivial = plant_hsp(s3, (), Side.LEFT)
    values = [trivial.oracle.evaluate(g) for g in s3.elements()]
    assert len(set(values)) == 6


def test_plant_hsp_rejects_outsiders():
    z4 = cyclic_group(4)
    with pytest.raises(PromiseViolationError):
        plant_hsp(z4, (CyclicElement(5, 1),), Side.LEFT)


def test_planted_kernel_equals_subgroup_closure():
    for group in (symmetric_group(3), symmetric_group(4), dihedral_group(6)):
        for side in (Side.LEFT, Side.RIGHT):
            for _, gens in zip(range(40), subgroup_list(group)):
                inst = plant_hsp(group, gens, side)
                expected = keys(close_under_op(gens, group.identity))
                assert keys(inst.kernel()) == expected
                assert verify_promise(inst)


def test_plant_coset_examples():
    z4 = cyclic_group(4)
    inst = plant_coset(z4, (CyclicElement(4, 2),), CyclicElement(4, 1))
    shifts = keys(inst.brute_shift_set())
    assert shifts == {element_key(CyclicElement(4, v)) for v in (1, 3)}

    u = CyclicElement(4, 3)
    shift_only = plant_coset(z4, (), u)
    assert keys(shift_only.brute_shift_set()) == {element_key(u)}

    same = plant_coset(z4, (), CyclicElement(4, 0))
    for g in z4.elements():
        assert same.f1.evaluate(g) == same.f2.evaluate(g)


def test_plant_hidden_shift_is_injective_coset_case():
    from cosetlab.instances import plant_hidden_shift
    s3 = symmetric_group(3)
    u = parse_cycles("(1 3 2)", 3)
    inst = plant_hidden_shift(s3, u)
    values = [inst.f1.evaluate(g) for g in s3.elements()]
    assert len(set(values)) == 6
    assert keys(inst.brute_shift_set()) == {element_key(u)}


def test_plant_coset_shift_set_is_exact_coset_nonabelian():
    s3 = symmetric_group(3)
    sub = (parse_cycles("(1 2)", 3),)
    sub_elems = close_under_op(sub, s3.identity)
    for u in s3.elements():
        inst = plant_coset(s3, sub, u)
        expected = {element_key(group_op(h, u)) for h in sub_elems}
        assert keys(inst.brute_shift_set()) == expected
        assert verify_promise(inst)


def test_plant_ghsh_chain_relations():
    z5 = cyclic_group(5)
    u = CyclicElement(5, 2)
    inst = plant_ghsh(z5, u, 3)
    for i in (1, 2):
        for g in z5.elements():
            assert inst.F(i, g) == inst.F(i + 1, group_op(u, g))

    same = plant_ghsh(z5, CyclicElement(5, 0), 3)
    for g in z5.elements():
        assert len({same.F(i, g) for i in (1, 2, 3)}) == 1

    with pytest.raises(ValueError):
        plant_ghsh(z5, u, 1)


def test_ghsh_shift_unique():
    for group in (cyclic_group(4), cyclic_group(6), symmetric_group(3),
                  dihedral_group(4)):
        for u in group.elements():
            for copies in (2, 3):
                inst = plant_ghsh(group, u, copies)
                found = inst.brute_shift_set()
                assert len(found) == 1
                assert element_key(found[0]) == element_key(u)
                assert verify_promise(inst)


def cyclic_action(n):
    group = cyclic_group(n)
    images = tuple((s + 1) % n for s in range(n))
    return GroupAction(group, tuple(f"s{i}" for i in range(n)), (images,))


def two_orbit_action(n, a, b):
    group = cyclic_group(n)
    row = tuple([(s + 1) % a for s in range(a)]
                + [a + ((s + 1) % b) for s in range(b)])
    states = tuple([f"a{i}" for i in range(a)] + [f"b{i}" for i in range(b)])
    return GroupAction(group, states, (row,))


def test_group_action_validation():
    z4 = cyclic_group(4)
    with pytest.raises(ValueError):
        GroupAction(z4, ("x", "y"), ((0, 0),))
    with pytest.raises(ValueError):
        # 4-cycle on 3 states is not an action of Z_4's generator of order 4
        GroupAction(z4, ("x", "y", "z"), ((1, 2, 0),))


def test_plant_orbit_coset_examples():
    act = cyclic_action(4)
    same = plant_orbit_coset(act, 0, CyclicElement(4, 0))
    assert same.phi0 == same.phi1 == 0

    inst = plant_orbit_coset(act, 0, CyclicElement(4, 2))
    assert inst.phi0 == 2
    assert act.stabilizer_generators(0) == []
    assert verify_promise(inst)

    disjoint = plant_orbit_coset(two_orbit_action(4, 4, 2), 0, None)
    assert not disjoint.orbits_intersect()
    assert verify_promise(disjoint)

    with pytest.raises(NoDisjointOrbitError):
        plant_orbit_coset(act, 0, None)


def test_verify_promise_rejects_bad_instances():
    s3 = symmetric_group(3)
    # constant label breaks distinctness for a proper subgroup claim
    bad = HspInstance(s3, OracleFunction(lambda g: 0), Side.LEFT,
                      planted_subgroup=(parse_cycles("(1 2)", 3),))
    assert not verify_promise(bad)

    # non-injective first function breaks the shift-chain promise
    z4 = cyclic_group(4)
    squash = OracleFunction(lambda g: g.value % 2)
    chain = GhshInstance(z4, (squash, squash))
    assert not verify_promise(chain)

    # right-side labels claimed as left-side fail for a non-normal subgroup
    planted = plant_hsp(s3, (parse_cycles("(1 2)", 3),), Side.RIGHT)
    relabeled = HspInstance(s3, planted.oracle, Side.LEFT,
                            planted_subgroup=planted.planted_subgroup)
    assert not verify_promise(relabeled)


def test_oracle_determinism_and_counting():
    z6 = cyclic_group(6)
    inst = plant_hsp(z6, (CyclicElement(6, 3),), Side.LEFT)
    g = CyclicElement(6, 4)
    before = inst.oracle.evaluations
    values = {inst.oracle.evaluate(g) for _ in range(100)}
    assert len(values) == 1
    assert inst.oracle.evaluations == before + 100


def test_instance_json_roundtrip():
    s3 = symmetric_group(3)
    planted = plant_hsp(s3, (parse_cycles("(1 2 3)", 3),), Side.LEFT)
    data = json.loads(json.dumps(instance_to_json(planted)))
    back = instance_from_json(data)
    for g in s3.elements():
        assert back.oracle.evaluate(g) == planted.oracle.evaluate(g)

    hc = plant_coset(cyclic_group(4), (CyclicElement(4, 2),), CyclicElement(4, 1))
    back2 = instance_from_json(json.loads(json.dumps(instance_to_json(hc))))
    assert keys(back2.brute_shift_set()) == keys(hc.brute_shift_set())

    gh = plant_ghsh(cyclic_group(5), CyclicElement(5, 2), 3)
    back3 = instance_from_json(json.loads(json.dumps(instance_to_json(gh))))
    assert element_key(back3.brute_shift_set()[0]) == element_key(CyclicElement(5, 2))

    oc = plant_orbit_coset(cyclic_action(4), 1, CyclicElement(4, 2))
    back4 = instance_from_json(json.loads(json.dumps(instance_to_json(oc))))
    assert back4.phi0 == oc.phi0 and back4.phi1 == oc.phi1
