import random

import pytest

from stripemerge.bounds import read_lower, total_lower, unchanged_upper
from stripemerge.codes import check_locality, is_mds, is_optimal_lrc, min_distance
from stripemerge.convert import (
    ConversionPlan,
    ConvertibleCode,
    build_lrc_merge,
    build_mds_merge,
    build_mds_to_lrc,
    execute,
    verify_convertible,
)
from stripemerge.field import field_create
from stripemerge.pgl import (
    cyclic_subgroup_of_order,
    subfield_elements,
    subgroup_affine,
    subgroup_cyclic_qplus1,
    subgroup_dihedral,
)

F23 = field_create(23, 1)
QUAD23 = (F23.element(21), F23.element(5))


def group23(d):
    return subgroup_cyclic_qplus1(F23, QUAD23, d)


def random_words(cc, rng):
    words = []
    for code in cc.initials:
        msg = [cc.field.element(rng.randrange(cc.field.q)) for _ in range(code.k)]
        words.append(code.encode(msg))
    return words


@pytest.fixture(scope="module")
def cc_q23():
    return build_mds_merge(F23, group23(4), k=5, t=4, lprime=4,
                           evaluate_at_pole=True, per_initial_dims=(5, 5, 5, 4))


@pytest.fixture(scope="module")
def cc_q32():
    F32 = field_create(2, 5)
    group = subgroup_dihedral(F32, 3, "q_plus")
    sub = cyclic_subgroup_of_order(group, 3)
    return build_lrc_merge(F32, group, sub, k=2, t=2, lprime=2)


@pytest.fixture(scope="module")
def cc_vi():
    return build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                            n_init=(9, 9, 9, 9))


def test_mds_merge_q23_shapes_and_costs(cc_q23):
    assert [c.n for c in cc_q23.initials] == [9, 9, 9, 8]
    assert [c.k for c in cc_q23.initials] == [5, 5, 5, 4]
    assert (cc_q23.final.n, cc_q23.final.k) == (23, 19)
    rep = cc_q23.static_access()
    assert (rep.read_cost, rep.write_cost, rep.per_symbol_read) == (16, 4, 16)
    # every written symbol combines exactly one read per stripe
    for _, triples in cc_q23.plan.terms:
        assert len(triples) == 4
        assert sorted(i for i, _, _ in triples) == [0, 1, 2, 3]


def test_mds_merge_q23_verify(cc_q23):
    report = verify_convertible(cc_q23, trials=20, check_components=False)
    assert report.ok and report.access_optimal
    assert (report.floors.min_read, report.floors.min_write) == (16, 4)
    assert (report.default_read, report.default_write) == (19, 4)


def test_mds_merge_q23_distance(cc_q23):
    assert min_distance(cc_q23.final, "parity_subsets") == 5
    assert all(is_mds(c) for c in cc_q23.initials)


def test_mds_merge_t1_trivial():
    cc = build_mds_merge(F23, group23(4), k=4, t=1, lprime=4)
    rep = cc.static_access()
    assert (rep.read_cost, rep.write_cost) == (4, 4)
    assert (cc.final.n, cc.final.k) == (8, 4)
    report = verify_convertible(cc, trials=10, check_components=True)
    assert report.ok and not report.bounds_applicable


def test_mds_merge_pole_free_route():
    # k + 1 = 5 orbits avoid infinity, so the plain route fits q = 23, l = 4
    cc = build_mds_merge(F23, group23(4), k=4, t=2, lprime=4)
    assert all(not lab.endswith("pinf") for lab in cc.final.labels)
    report = verify_convertible(cc, trials=10, check_components=True)
    assert report.ok and report.access_optimal


def test_mds_merge_affine_group_fixed_infinity():
    # translation group: infinity is ramified (fixed), so the written block
    # is an ordinary orbit and every pole-swap function degenerates to 1
    F16 = field_create(2, 4)
    trans = subgroup_affine(F16, [F16.one], subfield_elements(F16, 1))
    cc = build_mds_merge(F16, trans, k=3, t=2, lprime=2, evaluate_at_pole=True)
    assert not cc.provenance["evaluate_at_pole"]  # no pole route available
    assert (cc.final.n, cc.final.k) == (8, 6)
    rep = cc.static_access()
    assert (rep.read_cost, rep.write_cost) == (4, 2)
    report = verify_convertible(cc, trials=10, check_components=True)
    assert report.ok and report.access_optimal


def test_mds_merge_full_cyclic_group_rejected():
    # the order-24 group leaves no room for k >= 24: parameter error
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(24), k=5, t=4, lprime=24, evaluate_at_pole=True)


def test_mds_merge_validation_errors():
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(4), k=5, t=5, lprime=4)  # t > group order
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(4), k=3, t=2, lprime=4)  # group order > k
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(4), k=5, t=2, lprime=3)  # lprime < group order
    with pytest.raises(ValueError):
        # needs six orbits but only five avoid infinity
        build_mds_merge(F23, group23(4), k=5, t=2, lprime=4, evaluate_at_pole=False)
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(4), k=5, t=4, lprime=4,
                        evaluate_at_pole=True, per_initial_dims=(5, 5, 5))
    with pytest.raises(ValueError):
        build_mds_merge(F23, group23(4), k=5, t=4, lprime=4,
                        evaluate_at_pole=True, per_initial_dims=(5, 5, 5, 6))


def test_mds_merge_unchanged_values(cc_q23):
    rng = random.Random(2)
    for _ in range(25):
        words = random_words(cc_q23, rng)
        final_word, _ = execute(cc_q23, words)
        for i, pairs in enumerate(cc_q23.plan.unchanged):
            for src, dst in pairs:
                assert final_word[dst] == words[i][src]
                assert cc_q23.initials[i].labels[src] == cc_q23.final.labels[dst]


def test_lrc_merge_q32_shapes_and_costs(cc_q32):
    assert all((c.n, c.k) == (12, 4) for c in cc_q32.initials)
    assert (cc_q32.final.n, cc_q32.final.k) == (18, 8)
    rep = cc_q32.static_access()
    assert (rep.read_cost, rep.write_cost) == (8, 6)
    assert rep.per_symbol_read == 12  # 2 reads per written symbol, 6 written
    for _, triples in cc_q32.plan.terms:
        assert len(triples) == 2


def test_lrc_merge_q32_verify(cc_q32):
    report = verify_convertible(cc_q32, trials=20, check_components=False)
    assert report.ok and report.access_optimal
    assert (report.floors.min_read, report.floors.min_write) == (8, 6)
    assert (report.reference.min_read, report.reference.min_write) == (8, 6)


def test_lrc_merge_q32_optimal_components(cc_q32):
    assert is_optimal_lrc(cc_q32.initials[0], cc_q32.initial_cert)
    assert is_optimal_lrc(cc_q32.final, cc_q32.final_cert)
    assert min_distance(cc_q32.initials[0], "parity_subsets") == 8


def test_lrc_merge_schedule_reconstruction(cc_q32):
    # reconstructed values equal the stored ones on every codeword
    rng = random.Random(3)
    field = cc_q32.field
    sched = cc_q32.plan.schedule[0]
    for _ in range(20):
        words = random_words(cc_q32, rng)
        for i in range(len(cc_q32.initials)):
            for coord, parts in sched.recon:
                acc = field.zero
                for src, coeff in parts:
                    acc = acc + field.element(coeff) * words[i][src]
                assert acc == words[i][coord]


def test_lrc_merge_degenerate_single_coset():
    F32 = field_create(2, 5)
    group = subgroup_dihedral(F32, 3, "q_plus")
    sub = cyclic_subgroup_of_order(group, 3)
    cc = build_lrc_merge(F32, sub, sub, k=2, t=1, lprime=1)
    rep = cc.static_access()
    assert rep.write_cost == 3  # one block of r + delta - 1
    report = verify_convertible(cc, trials=5, check_components=False)
    assert report.ok and not report.bounds_applicable


def test_lrc_merge_affine_translations():
    F16 = field_create(2, 4)
    big = subgroup_affine(F16, [F16.one], subfield_elements(F16, 2))
    small = subgroup_affine(F16, [F16.one], subfield_elements(F16, 1))
    assert big.is_subgroup(small)
    cc = build_lrc_merge(F16, big, small, k=2, t=2, lprime=2)
    assert cc.provenance["degenerate_locality"]  # r = 1
    rep = cc.static_access()
    assert (rep.read_cost, rep.write_cost) == (4, 4)
    report = verify_convertible(cc, trials=10, check_components=True)
    assert report.ok and report.access_optimal


def test_lrc_merge_delta3_translation_pair():
    # repair groups of size 4 with two locally-rebuilt symbols per block
    F64 = field_create(2, 6)
    w_all = [e for e in F64.elements() if (e ** 8) == e]  # GF(8)
    nz = [w for w in w_all if w.enc]
    sub4 = [F64.zero, nz[0], nz[1], nz[0] + nz[1]]
    big = subgroup_affine(F64, [F64.one], w_all)
    small = subgroup_affine(F64, [F64.one], sub4)
    cc = build_lrc_merge(F64, big, small, k=2, t=2, lprime=2, delta=3)
    assert (cc.final.n, cc.final.k) == (24, 8)
    assert cc.params.d_final == 11 and cc.params.r == 2
    rep = cc.static_access()
    assert (rep.read_cost, rep.write_cost) == (8, 8)  # 2 of 4 read per block
    assert rep.per_symbol_read == 16
    report = verify_convertible(cc, trials=10, check_components=False)
    assert report.ok and report.access_optimal
    assert check_locality(cc.final, cc.final_cert)
    assert is_optimal_lrc(cc.initials[0], cc.initial_cert)  # [16,4] with d = 11


def test_lrc_merge_nested_cyclic_odd_characteristic():
    # same shape as the dihedral desk instance, from nested cyclic groups
    G6 = subgroup_cyclic_qplus1(F23, QUAD23, 6)
    H3 = cyclic_subgroup_of_order(G6, 3)
    cc = build_lrc_merge(F23, G6, H3, k=2, t=2, lprime=2, delta=2)
    assert (cc.final.n, cc.final.k) == (18, 8)
    rep = cc.static_access()
    assert (rep.read_cost, rep.write_cost) == (8, 6)
    report = verify_convertible(cc, trials=10, check_components=False)
    assert report.ok and report.access_optimal
    assert is_optimal_lrc(cc.final, cc.final_cert)  # d = 8 again


def test_lrc_merge_validation_errors():
    F32 = field_create(2, 5)
    group = subgroup_dihedral(F32, 3, "q_plus")
    sub = cyclic_subgroup_of_order(group, 3)
    other = subgroup_dihedral(F32, 1, "q_plus")
    with pytest.raises(ValueError):
        build_lrc_merge(F32, group, other, k=2, t=2, lprime=2)  # not a subgroup
    with pytest.raises(ValueError):
        build_lrc_merge(F32, group, sub, k=2, t=3, lprime=2)  # t > coset count
    with pytest.raises(ValueError):
        build_lrc_merge(F32, group, sub, k=1, t=1, lprime=2)  # cosets > k
    with pytest.raises(ValueError):
        build_lrc_merge(F32, group, sub, k=2, t=2, lprime=2, delta=4)  # r < 1


def test_mds_to_lrc_vi_shapes_and_costs(cc_vi):
    assert all((c.n, c.k) == (9, 4) for c in cc_vi.initials)
    assert (cc_vi.final.n, cc_vi.final.k) == (20, 16)
    assert cc_vi.params.d_final == 4 and cc_vi.params.r == 9
    rep = cc_vi.static_access()
    assert (rep.read_cost, rep.write_cost) == (12, 4)
    assert rep.unchanged_counts == (4, 4, 4, 4)


def test_mds_to_lrc_vi_bounds(cc_vi):
    p = cc_vi.params
    for i in range(4):
        assert len(cc_vi.plan.unchanged[i]) == unchanged_upper(p, i) == 4
        assert len(cc_vi.plan.reads[i]) == read_lower(p, i, 4) == 3
    report = verify_convertible(cc_vi, trials=20, check_components=False)
    assert report.ok and report.access_optimal
    assert (report.floors.min_read, report.floors.min_write) == (12, 4)


def test_mds_to_lrc_vi_components(cc_vi):
    assert all(is_mds(c) for c in cc_vi.initials)
    assert is_optimal_lrc(cc_vi.final, cc_vi.final_cert)
    assert min_distance(cc_vi.final, "parity_subsets") == 4


def test_mds_to_lrc_written_block_invertible(cc_vi):
    # the written columns of the parity matrix form an invertible square block
    w = list(cc_vi.plan.written)
    assert len(w) == 4
    block = cc_vi.final.parity.submatrix_cols(w)
    assert block.rows == block.cols == 4
    block.invert()  # raises if singular


def test_mds_to_lrc_larger_instance():
    F37 = field_create(37, 1)
    cc = build_mds_to_lrc(F37, s=2, a=2, tprime=2, delta=2, k_init=6,
                          n_init=(14, 14, 14, 14))
    assert (cc.final.n, cc.final.k) == (30, 24)
    assert cc.params.d_final == 6 and cc.params.r == 14
    w = list(cc.plan.written)
    assert len(w) == 6
    cc.final.parity.submatrix_cols(w).invert()
    assert verify_convertible(cc, trials=10, check_components=False).ok


def test_mds_to_lrc_supplied_elements():
    # reversed locator assignment: still optimal, different plan
    cc = build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                          n_init=(9, 9, 9, 9), elements=list(range(19, 0, -1)))
    assert verify_convertible(cc, trials=10, check_components=False).ok
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                         n_init=(9, 9, 9, 9), elements=[1, 1] + list(range(17)))
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                         n_init=(9, 9, 9, 9), elements=[0, 1, 2])


def test_mds_to_lrc_single_group():
    cc = build_mds_to_lrc(F23, s=2, a=1, tprime=1, delta=2, k_init=4,
                          n_init=(9, 9))
    assert cc.params.n_final == 10 and cc.params.k_final == 8
    assert verify_convertible(cc, trials=10, check_components=True).ok


def test_mds_to_lrc_validation_errors():
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=1, a=1, tprime=2, delta=2, k_init=4, n_init=(9,) * 2)
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=2, a=2, tprime=2, delta=2, k_init=4, n_init=(9,) * 4)
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4, n_init=(9,) * 3)
    with pytest.raises(ValueError):
        build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4, n_init=(6,) * 4)


def test_mds_merge_smallest_full_length_fields():
    # the written block absorbs the whole projective line: n_F = q + 1
    from stripemerge.field import primitive_quadratic_search

    for q, k in ((5, 2), (7, 3)):
        F = field_create(q, 1)
        quad = primitive_quadratic_search(F)
        group = subgroup_cyclic_qplus1(F, quad, 2)
        cc = build_mds_merge(F, group, k=k, t=2, lprime=2, evaluate_at_pole=True)
        assert cc.final.n == min(2 * k + 2, q + 1)
        assert is_mds(cc.final) and all(is_mds(c) for c in cc.initials)
        report = verify_convertible(cc, trials=10, check_components=False)
        assert report.ok and report.access_optimal


def test_construction_is_deterministic():
    import json

    a = build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                         n_init=(9, 9, 9, 9))
    b = build_mds_to_lrc(F23, s=2, a=1, tprime=2, delta=2, k_init=4,
                         n_init=(9, 9, 9, 9))
    assert json.dumps(a.to_obj(), sort_keys=True) == json.dumps(b.to_obj(), sort_keys=True)
    c = build_mds_merge(F23, group23(4), k=5, t=3, lprime=4, evaluate_at_pole=True)
    d = build_mds_merge(F23, group23(4), k=5, t=3, lprime=4, evaluate_at_pole=True)
    assert json.dumps(c.to_obj(), sort_keys=True) == json.dumps(d.to_obj(), sort_keys=True)


def test_field_size_cap():
    with pytest.raises(ValueError):
        field_create(2, 17)  # q > 2^16 is out of scope


def test_execute_zero_inputs(cc_vi):
    field = cc_vi.field
    words = [tuple(field.zero for _ in range(c.n)) for c in cc_vi.initials]
    final_word, rep = execute(cc_vi, words)
    assert all(e.enc == 0 for e in final_word)
    assert (rep.read_cost, rep.write_cost) == (12, 4)  # costs count accesses


def test_execute_rejects_non_codeword(cc_vi):
    field = cc_vi.field
    words = [list(w) for w in random_words(cc_vi, random.Random(5))]
    words[0][0] = words[0][0] + field.one
    with pytest.raises(ValueError):
        execute(cc_vi, [tuple(w) for w in words])


def test_execute_detects_corrupt_plan(cc_vi):
    plan = cc_vi.plan
    w, triples = plan.terms[0]
    i, coord, coeff = triples[0]
    bad_triples = ((i, coord, coeff % (cc_vi.field.q - 1) + 1),) + triples[1:]
    if bad_triples[0][2] == coeff:
        bad_triples = ((i, coord, (coeff + 1) % cc_vi.field.q or 1),) + triples[1:]
    bad_plan = ConversionPlan(
        unchanged=plan.unchanged,
        reads=plan.reads,
        written=plan.written,
        terms=((w, bad_triples),) + plan.terms[1:],
        schedule=plan.schedule,
    )
    bad_cc = ConvertibleCode(
        field=cc_vi.field,
        kind=cc_vi.kind,
        initials=cc_vi.initials,
        final=cc_vi.final,
        plan=bad_plan,
        params=cc_vi.params,
        final_cert=cc_vi.final_cert,
    )
    with pytest.raises(AssertionError):
        execute(bad_cc, random_words(bad_cc, random.Random(6)))


def test_bundle_roundtrip(cc_q32):
    again = ConvertibleCode.from_obj(cc_q32.to_obj())
    rng = random.Random(7)
    words = random_words(again, rng)
    a, _ = execute(again, words)
    b, _ = execute(cc_q32, words)
    assert a == b


def test_measured_costs_meet_floors_everywhere(cc_q23, cc_q32, cc_vi):
    for cc in (cc_q23, cc_q32, cc_vi):
        rep = cc.static_access()
        floors = total_lower(cc.params)
        assert rep.read_cost >= floors.min_read
        assert rep.write_cost >= floors.min_write
