from fractions import Fraction
from itertools import combinations

import pytest

from theta2 import chars
from theta2.errors import DerivationError
from theta2.groebner import GFP1, QQ, MonomialOrder, buchberger_engine, to_engine
from theta2.numerics import EvalConfig, relation_residual, sample_siegel
from theta2.symbolic import (
    GradedPoly,
    ModuleElement,
    clear_denominator,
    poly_from_text,
    poly_to_text,
)
from theta2.thetaring import (
    CHI5_EXPS,
    GRADIENT_MODULE_SERIES,
    NVARS,
    SHIFTS,
    DTableEntry,
    catalog_json,
    d_entry,
    d_table,
    extr_a,
    extr_b,
    extr_h,
    ideal_times_free,
    rel_d,
    riemann_ideal,
    sextets,
    symplectic_label_permutations,
    bracket_modules,
)

CFG = EvalConfig(radius=10, target_eps=1e-12, seed=7)


def P(text):
    return poly_from_text(text, NVARS)


def elem(parts: dict[int, str], denominator=None) -> ModuleElement:
    comps = tuple(P(parts.get(i, "0")) for i in range(1, 7))
    return ModuleElement(comps, SHIFTS, denominator)


# -- quartic list ------------------------------------------------------------

def test_riemann_first_and_last_entries():
    quartics = riemann_ideal()
    assert len(quartics) == 20
    assert quartics[0] == P("1*t6^2*t8^2 - 1*t4^2*t9^2 + 1*t1^2*t10^2")
    assert quartics[-1] == P("1*t1^4 - 1*t2^4 - 1*t6^4 - 1*t9^4")
    assert all(q.is_homogeneous() and q.degree() == 4 for q in quartics)


# -- determinant table --------------------------------------------------------

def test_d_table_entries_and_signs():
    assert d_entry(1, 5) == DTableEntry((1, 5), (3, 4, 6, 10), -1)
    assert d_entry(5, 6) == DTableEntry((5, 6), (5, 6, 7, 8), 1)
    assert d_entry(1, 2).quadruple == (7, 8, 9, 10)


def test_d_table_quadruples_match_combinatorics():
    for entry in d_table():
        assert entry.quadruple == chars.azygetic_quadruple(*entry.pair)


def test_riemann_basis_contains_fourth_power_difference():
    from theta2.groebner import buchberger

    basis = buchberger(riemann_ideal(), field=QQ)
    assert basis.contains(P("1*t7^4 - 1*t8^4 - 1*t9^4 + 1*t10^4"))
    assert basis.normal_form(P("1*t7^4 - 1*t8^4 - 1*t9^4 + 1*t10^4")).is_zero()


def test_extr_b_assignment_rule_on_worked_block():
    from theta2.thetaring import _extr_b_assignments

    block = [frozenset(WORKED_BLOCK[oi]) for oi in range(1, 7)]
    assert _extr_b_assignments(block, 5) == {1: 8, 2: 9, 3: 10, 4: 5, 6: 4}


# -- three-term relations ------------------------------------------------------

def test_rel_d_count_and_degrees():
    rels = rel_d()
    assert len(rels) == 20
    assert all(r.element.degree() == 4 for r in rels)
    assert [r.indices for r in rels] == list(combinations(range(1, 7), 3))


def test_rel_d_first_triple_coefficients():
    # the mechanical combination from the sign table; the T3 sign is certified
    # numerically (the prose rendering of this relation elsewhere misprints it)
    r = next(r for r in rel_d() if r.indices == (1, 2, 3))
    assert r.element == elem({1: "1*t1*t4*t6", 2: "-1*t2*t3*t5", 3: "1*t8*t9*t10"})
    Z = sample_siegel(7, 1)[0]
    assert relation_residual(r.element, Z, CFG) < 1e-9
    wrong = elem({1: "1*t1*t4*t6", 2: "-1*t2*t3*t5", 3: "-1*t8*t9*t10"})
    assert relation_residual(wrong, Z, CFG) > 1e-3


# -- four-term relations --------------------------------------------------------

def test_extr_a_count_and_pair_5_6(oracle):
    rels = extr_a(oracle)
    assert len(rels) == 30
    assert all(r.element.degree() == 7 for r in rels)
    r56 = next(r for r in rels if r.indices == (5, 6))
    # theta6^2 D(1,5) T1 - theta5^2 D(2,5) T2 - theta8^2 D(3,5) T3 + theta7^2 D(4,5) T4
    printed = elem({
        1: "-1*t3*t4*t6^3*t10",
        2: "1*t1*t2*t5^3*t10",
        3: "1*t1*t3*t8^3*t9",
        4: "-1*t2*t4*t7^3*t9",
    })
    assert r56.element == printed or r56.element == -printed


def test_extr_a_squared_theta_rule(oracle):
    # the squared factor for each term divides both determinant products
    r = next(r for r in extr_a(oracle) if r.indices == (5, 6))
    squares = {}
    for i, p in enumerate(r.element.components, 1):
        if p.is_zero():
            continue
        (exps,) = p.terms
        squares[i] = [k + 1 for k, e in enumerate(exps) if e >= 2]
    assert squares == {1: [6], 2: [5], 3: [8], 4: [7]}


def test_extr_a_numeric(points, oracle):
    for r in extr_a(oracle)[:6]:
        assert relation_residual(r.element, points[0], CFG) < 1e-9


# -- sextets and five-term relations ---------------------------------------------

WORKED_BLOCK = {1: {3, 5, 6, 8, 9}, 2: {1, 2, 4, 8, 9}, 4: {2, 5, 7, 8, 10},
               6: {4, 6, 7, 9, 10}, 3: {1, 3, 4, 5, 10}, 5: {1, 2, 3, 6, 7}}


def test_sextets_partition(oracle):
    blocks = sextets(oracle)
    assert len(blocks) == 12
    seen = set()
    for block in blocks:
        assert sorted(s.odd_index for s in block) == [1, 2, 3, 4, 5, 6]
        for k in range(1, 11):
            assert sum(k in s.even_set for s in block) == 3
        # structural consequence: members overlap in exactly two even labels
        for a, b in combinations(block, 2):
            assert len(a.even_set & b.even_set) == 2
        for s in block:
            seen.add((s.odd_index, s.even_set))
    assert len(seen) == 72


def test_sextets_contain_worked_block(oracle):
    blocks = sextets(oracle)
    target = {(oi, frozenset(ev)) for oi, ev in WORKED_BLOCK.items()}
    assert any({(s.odd_index, s.even_set) for s in block} == target
               for block in blocks)


def test_extr_b_count_and_degrees(oracle):
    rels = extr_b(oracle)
    assert len(rels) == 72
    assert all(r.element.degree() == 8 for r in rels)
    assert len({r.indices for r in rels}) == 72


def test_extr_b_worked_example(oracle):
    # cancelling the (odd 5, {1,2,3,6,7}) member of the worked block gives
    # t8^2 S1 - t9^2 S2 + t5^2 S3 - t4^2 S4 + t10^2 S5
    blocks = sextets(oracle)
    target = {(oi, frozenset(ev)) for oi, ev in WORKED_BLOCK.items()}
    block = next(b for b in blocks
                 if {(s.odd_index, s.even_set) for s in b} == target)
    sid = block[0].sextet_id
    rec = next(r for r in extr_b(oracle) if r.indices == (sid, 5))
    printed = elem({
        1: "1*t3*t5*t6*t8^3*t9",        # t8^2 * S(odd1)
        2: "-1*t1*t2*t4*t8*t9^3",       # -t9^2 * S(odd2)
        4: "1*t2*t5^3*t7*t8*t10",       # +t5^2 * S(odd4)
        6: "-1*t4^3*t6*t7*t9*t10",      # -t4^2 * S(odd6)
        3: "1*t1*t3*t4*t5*t10^3",       # +t10^2 * S(odd3)
    })
    assert rec.element == printed or rec.element == -printed


def test_extr_b_numeric(points, oracle):
    for r in extr_b(oracle)[:6]:
        assert relation_residual(r.element, points[0], CFG) < 1e-9


def test_relation_records_certified(oracle):
    for r in extr_a(oracle)[:3] + extr_b(oracle)[:3]:
        assert oracle.certify(r.element)
    assert all(oracle.certify(r.element) for r in rel_d())


# -- label permutations -----------------------------------------------------------

def test_symplectic_label_permutations():
    perms = symplectic_label_permutations()
    assert len(perms) == 720
    ids = tuple(range(1, 11)), tuple(range(1, 7))
    assert ids in perms
    odd_maps = {p[1] for p in perms}
    assert len(odd_maps) == 720          # faithful on the odd labels


def test_permutations_preserve_azygetic_structure():
    for even_map, odd_map in symplectic_label_permutations()[:40]:
        for (i, j) in ((1, 2), (3, 5)):
            quad = chars.azygetic_quadruple(i, j)
            oi, oj = sorted((odd_map[i - 1], odd_map[j - 1]))
            image = tuple(sorted(even_map[k - 1] for k in quad))
            assert image == chars.azygetic_quadruple(oi, oj)


# -- the extra generator -----------------------------------------------------------

def test_extr_h_shape_and_degrees():
    h = extr_h()
    assert h.denominator == (0, 1, 0, 0, 1, 0, 0, 0, 0, 0)
    assert h.components[0] == P("1*t4*t6^4*t8 + 1*t4*t8*t9^4")
    assert h.components[2] == P("-1*t1*t6*t9*t10^3")
    assert all(h.components[i].is_zero() for i in (1, 3, 4, 5))
    assert h.components[0].degree() == 6
    assert h.degree() == 5
    numerator = ModuleElement(h.components, h.shifts)
    assert numerator.degree() == 7


# -- pipeline ----------------------------------------------------------------------

def test_total_kernel_contains_all_catalog_relations(pipe_p1, oracle):
    kernel = pipe_p1.total_kernel()
    for r in rel_d() + extr_a(oracle)[:5] + extr_b(oracle)[:5]:
        assert kernel.contains(r.element)


def test_completeness(pipe_p1):
    assert pipe_p1.completeness_check()


def test_colon_routes_agree_on_kernel_seed(pipe_p1):
    # rotated-basis colon versus the syzygy route, on the real seed module
    from theta2.groebner import (
        buchberger_engine,
        colon_by_variable,
        convert_element,
        syzygy_engine,
    )

    k0 = pipe_p1.kernel_seed()
    order, field = k0.order, k0.field
    fast, rorder = colon_by_variable(k0.engine.elements, 0, order, field)
    fast = buchberger_engine(
        [convert_element(e, rorder, order) for e in fast], order, field)
    x1 = GradedPoly.variable(NVARS, 0)
    targets = [to_engine(ModuleElement.generator(NVARS, 6, i, shifts=SHIFTS, coeff=x1),
                         order, field) for i in range(6)]
    syz = syzygy_engine(targets, k0.engine.elements, order, field)
    slow = buchberger_engine([], order, field, seed=syz)
    assert fast == slow


def test_m_pair_membership(pipe_p1):
    chi5 = GradedPoly.monomial(NVARS, CHI5_EXPS)
    mp = pipe_p1.m_pair(1, 2)
    assert pipe_p1.complement_product(1, 2) == (1, 1, 1, 1, 1, 1, 0, 0, 0, 0)
    t1 = ModuleElement.generator(NVARS, 6, 0, shifts=SHIFTS, coeff=chi5)
    assert mp.contains(t1)
    p12t1 = ModuleElement.generator(
        NVARS, 6, 0, shifts=SHIFTS,
        coeff=GradedPoly.monomial(NVARS, pipe_p1.complement_product(1, 2)))
    assert mp.contains(p12t1)
    assert not pipe_p1.m_pair(3, 4).contains(p12t1)


def test_chi5_m_membership_and_series(pipe_p1):
    cm = pipe_p1.chi5_m()
    chi5 = GradedPoly.monomial(NVARS, CHI5_EXPS)
    for i in range(6):
        assert cm.contains(ModuleElement.generator(NVARS, 6, i, shifts=SHIFTS,
                                                   coeff=chi5))
    assert cm.contains(clear_denominator(extr_h(), CHI5_EXPS))
    series = pipe_p1.module_series().reduced()
    assert series.same_rational_function(GRADIENT_MODULE_SERIES)


def test_kernel_series_low_degrees(pipe_p1):
    # the inner module has dimensions 6 and 60 in degrees 1 and 2, matching
    # the full module through degree 4 (the extra generator enters at 5)
    hs = pipe_p1.total_kernel().hilbert_series()
    dims = hs.expand(5)
    full = GRADIENT_MODULE_SERIES.expand(5)
    assert dims[1] == 6 and dims[2] == 60
    assert dims[1:5] == full[1:5]
    assert dims[5] < full[5]


def test_structure_report_report(pipe_p1):
    rep = pipe_p1.structure_report()
    assert rep.orbit_size == 360
    assert rep.generated_in_intersection and rep.intersection_in_generated
    assert rep.extr_h_in_intersection and rep.extr_h_outside_gradient_span
    assert rep.series_matches
    assert rep.coefficients[:8] == [6, 60, 330, 1300, 4060, 9952, 20000, 35168]
    assert rep.ok()


def test_orbit_elements_certified(pipe_p1):
    orbit = pipe_p1.orbit_extr_h()
    assert len(orbit) == 360
    cm = pipe_p1.chi5_m()
    for e in orbit[::60]:
        assert e.denominator is not None
        assert cm.contains(clear_denominator(e, CHI5_EXPS))
    # identity permutation reproduces the generator itself
    h = extr_h()
    assert any(e.components == h.components and e.denominator == h.denominator
               for e in orbit)


def test_internal_series_consistency():
    # numerator versus printed expansion: 316 + 126*4 + 36*10 + 6*20 = 1300
    assert 316 + 126 * 4 + 36 * 10 + 6 * 20 == 1300
    assert GRADIENT_MODULE_SERIES.expand(8)[1:] == [6, 60, 330, 1300, 4060, 9952,
                                                 20000, 35168]


# -- second-kind presentations --------------------------------------------------------

def test_bracket_modules_dimensions():
    wm = bracket_modules()
    plus, minus = wm["plus"], wm["minus"]
    assert len(plus["generators"]) == 6
    assert plus["dimensions"][2] == 6
    assert len(plus["relations"]) == 4
    assert plus["dimensions"][3] == 6 * 4 - 4    # four independent degree-3 relations
    assert minus["dimensions"][5] == 4
    assert minus["dimensions"][6] == 4 * 4 - 1


def test_symmetric_square_relation_membership():
    # f3 B12 - f2 B13 + f1 B23 reduces to zero in the presentation
    wm = bracket_modules()
    order = MonomialOrder(4, rank=6)
    basis = buchberger_engine(
        [to_engine(r, order, QQ) for r in wm["plus"]["relations"]], order, QQ)
    from theta2.groebner import EngineBasis
    eng = EngineBasis(basis, order, QQ)
    f = [GradedPoly.variable(4, i) for i in range(4)]
    pair_index = {(1, 2): 3, (1, 3): 4, (2, 3): 5}
    target = (ModuleElement.generator(4, 6, pair_index[(1, 2)], shifts=(2,) * 6, coeff=f[3])
              - ModuleElement.generator(4, 6, pair_index[(1, 3)], shifts=(2,) * 6, coeff=f[2])
              + ModuleElement.generator(4, 6, pair_index[(2, 3)], shifts=(2,) * 6, coeff=f[1]))
    assert eng.contains(to_engine(target, order, QQ))


# -- catalog json -----------------------------------------------------------------------

def test_catalog_json_shapes(oracle):
    assert len(catalog_json("riemann")["quartics"]) == 20
    dtab = catalog_json("dtable")["entries"]
    assert len(dtab) == 15 and all(e["cross_checked"] for e in dtab)
    assert len(catalog_json("reld")["relations"]) == 20
    with pytest.raises(ValueError):
        catalog_json("bogus")
