"""Relation catalogs and the module-structure pipeline for the theta ring.

The ring is Q[t1..t10] modulo the twenty quartic relations; the module of
interest is presented on six generators T1..T6 (the gradient images, each
of degree 1).  This module derives the relation catalogs (20 three-term,
30 four-term, 72 five-term), certifies them with the multiplication oracle,
computes the full relation kernel as a colon module, intersects the fifteen
localized modules, handles the extra generator with its 360-element orbit,
and produces the Hilbert series of the intersection, plus the two
second-kind presentations with their series.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import chars
from .errors import DerivationError
from .groebner import (
    QQ,
    GFP1,
    GFP2,
    BasisCache,
    EngineBasis,
    GroebnerBasis,
    MonomialOrder,
    buchberger_engine,
    hilbert_series_engine,
    intersect_pair_engine,
    module_quotient_engine,
    to_engine,
)
from .symbolic import (
    GradedPoly,
    HilbertSeries,
    ModuleElement,
    clear_denominator,
    element_to_text,
    monomial_divide,
    poly_to_text,
)

NVARS = 10
RANK = 6
CHI5_EXPS = (1,) * 10
SHIFTS = (1,) * 6


def _mono(pairs: Iterable[tuple[int, int]], c: int = 1) -> GradedPoly:
    e = [0] * NVARS
    for label, p in pairs:
        e[label - 1] += p
    return GradedPoly.monomial(NVARS, e, c)


def _exps(labels: Iterable[int]) -> tuple[int, ...]:
    e = [0] * NVARS
    for k in labels:
        e[k - 1] += 1
    return tuple(e)


def _sq(label: int) -> tuple[int, ...]:
    e = [0] * NVARS
    e[label - 1] = 2
    return tuple(e)


def _addexp(*vecs: Sequence[int]) -> tuple[int, ...]:
    out = [0] * NVARS
    for v in vecs:
        for i, x in enumerate(v):
            out[i] += x
    return tuple(out)


# ---------------------------------------------------------------------------
# Quartic ideal and the determinant table
# ---------------------------------------------------------------------------

# (coefficient, [(label, power), ...]) per term, in the printed order
_QUARTIC_DATA = [
    [(1, [(6, 2), (8, 2)]), (-1, [(4, 2), (9, 2)]), (1, [(1, 2), (10, 2)])],
    [(1, [(5, 2), (8, 2)]), (-1, [(2, 2), (9, 2)]), (1, [(3, 2), (10, 2)])],
    [(1, [(7, 4)]), (-1, [(8, 4)]), (-1, [(9, 4)]), (1, [(10, 4)])],
    [(1, [(6, 2), (7, 2)]), (-1, [(3, 2), (9, 2)]), (1, [(2, 2), (10, 2)])],
    [(1, [(5, 2), (7, 2)]), (-1, [(1, 2), (9, 2)]), (1, [(4, 2), (10, 2)])],
    [(1, [(4, 2), (7, 2)]), (-1, [(3, 2), (8, 2)]), (-1, [(5, 2), (10, 2)])],
    [(1, [(3, 2), (7, 2)]), (-1, [(4, 2), (8, 2)]), (-1, [(6, 2), (9, 2)])],
    [(1, [(2, 2), (7, 2)]), (-1, [(1, 2), (8, 2)]), (-1, [(6, 2), (10, 2)])],
    [(1, [(1, 2), (7, 2)]), (-1, [(2, 2), (8, 2)]), (-1, [(5, 2), (9, 2)])],
    [(1, [(5, 4)]), (-1, [(6, 4)]), (-1, [(9, 4)]), (1, [(10, 4)])],
    [(1, [(4, 2), (5, 2)]), (-1, [(2, 2), (6, 2)]), (-1, [(7, 2), (10, 2)])],
    [(1, [(3, 2), (5, 2)]), (-1, [(1, 2), (6, 2)]), (-1, [(8, 2), (10, 2)])],
    [(1, [(2, 2), (5, 2)]), (-1, [(4, 2), (6, 2)]), (-1, [(8, 2), (9, 2)])],
    [(1, [(1, 2), (5, 2)]), (-1, [(3, 2), (6, 2)]), (-1, [(7, 2), (9, 2)])],
    [(1, [(3, 4)]), (-1, [(4, 4)]), (-1, [(6, 4)]), (1, [(10, 4)])],
    [(1, [(2, 2), (3, 2)]), (-1, [(1, 2), (4, 2)]), (1, [(9, 2), (10, 2)])],
    [(1, [(1, 2), (3, 2)]), (-1, [(2, 2), (4, 2)]), (-1, [(5, 2), (6, 2)])],
    [(1, [(2, 4)]), (-1, [(4, 4)]), (-1, [(8, 4)]), (1, [(10, 4)])],
    [(1, [(1, 2), (2, 2)]), (-1, [(3, 2), (4, 2)]), (-1, [(7, 2), (8, 2)])],
    [(1, [(1, 4)]), (-1, [(2, 4)]), (-1, [(6, 4)]), (-1, [(9, 4)])],
]

# printed sign of each determinant entry; the quadruples themselves are
# re-derived from the azygetic condition and cross-checked
_DTABLE_SIGNS = {
    (1, 2): 1, (1, 3): 1, (1, 4): 1, (1, 5): -1, (1, 6): 1,
    (2, 3): 1, (2, 4): 1, (2, 5): -1, (2, 6): 1, (3, 4): -1,
    (3, 5): -1, (3, 6): 1, (4, 5): -1, (4, 6): 1, (5, 6): 1,
}


@dataclass(frozen=True)
class DTableEntry:
    pair: tuple[int, int]
    quadruple: tuple[int, int, int, int]
    sign: int

    def product(self) -> GradedPoly:
        return _mono([(k, 1) for k in self.quadruple], self.sign)


@dataclass(frozen=True)
class RelationRecord:
    kind: str                      # "RelD" | "ExtrA" | "ExtrB"
    indices: tuple
    element: ModuleElement


@dataclass(frozen=True)
class SForm:
    odd_index: int
    even_set: frozenset[int]
    sextet_id: int

    def exponents(self) -> tuple[int, ...]:
        return _exps(sorted(self.even_set))


def riemann_ideal() -> list[GradedPoly]:
    """The twenty degree-4 defining relations of the theta ring."""
    out = []
    for rel in _QUARTIC_DATA:
        p = GradedPoly.zero(NVARS)
        for c, pairs in rel:
            p = p + _mono(pairs, c)
        out.append(p)
    return out


@lru_cache(maxsize=1)
def d_table() -> tuple[DTableEntry, ...]:
    """The fifteen gradient-determinant entries with their signs."""
    out = []
    for i, j in itertools.combinations(range(1, 7), 2):
        quad = chars.azygetic_quadruple(i, j)
        out.append(DTableEntry((i, j), quad, _DTABLE_SIGNS[(i, j)]))
    return tuple(out)


def d_entry(i: int, j: int) -> DTableEntry:
    if not i < j:
        raise ValueError("d_entry expects i < j")
    return d_table()[list(itertools.combinations(range(1, 7), 2)).index((i, j))]


@lru_cache(maxsize=1)
def _rel_d_cached() -> tuple[RelationRecord, ...]:
    return tuple(_derive_rel_d())


def rel_d() -> list[RelationRecord]:
    return list(_rel_d_cached())


def _derive_rel_d() -> list[RelationRecord]:
    """The twenty three-term relations, one per odd triple.

    For a triple i<j<k the combination D(i,j) T_k - D(i,k) T_j + D(j,k) T_i
    has a unique common theta factor, which is divided out; the result is
    homogeneous of degree 4.
    """
    out = []
    for i, j, k in itertools.combinations(range(1, 7), 3):
        dij, dik, djk = d_entry(i, j), d_entry(i, k), d_entry(j, k)
        common = set(dij.quadruple) & set(dik.quadruple) & set(djk.quadruple)
        if len(common) != 1:
            raise DerivationError(
                f"triple ({i},{j},{k}) has no unique common theta factor: {common}")
        cv = _exps([common.pop()])
        comps = {k: dij.product(), j: dik.product().scale(-1), i: djk.product()}
        parts = []
        for idx in range(1, 7):
            p = comps.get(idx, GradedPoly.zero(NVARS))
            if p.is_zero():
                parts.append(p)
                continue
            q = p.divide_by_monomial(cv)
            if q is None:
                raise DerivationError(
                    f"coefficient of T{idx} in triple ({i},{j},{k}) is not "
                    f"divisible by the common theta")
            parts.append(q)
        elem = ModuleElement(tuple(parts), SHIFTS)
        if not (elem.is_homogeneous() and elem.degree() == 4):
            raise DerivationError(f"three-term relation ({i},{j},{k}) has wrong degree")
        out.append(RelationRecord("RelD", (i, j, k), elem))
    return out


def ideal_times_free() -> list[ModuleElement]:
    """Each quartic times each module generator: the ideal layer of every module."""
    out = []
    for q in riemann_ideal():
        for i in range(RANK):
            out.append(ModuleElement.generator(NVARS, RANK, i, shifts=SHIFTS, coeff=q))
    return out


# ---------------------------------------------------------------------------
# The multiplication oracle
# ---------------------------------------------------------------------------

def _nullspace(vecs: list[dict], field) -> list[list]:
    """Basis of {c : sum c_i vecs_i = 0} for sparse engine vectors."""
    keys = sorted(set().union(*[set(v) for v in vecs]) if vecs else set(), reverse=True)
    kidx = {k: r for r, k in enumerate(keys)}
    n = len(vecs)
    rows = [[field.convert(0)] * n for _ in keys]
    for ci, v in enumerate(vecs):
        for k, val in v.items():
            rows[kidx[k]][ci] = field.normalize(val)
    pivots = []
    r = 0
    for col in range(n):
        piv = next((rr for rr in range(r, len(rows)) if field.normalize(rows[rr][col])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][col])
        rows[r] = [field.normalize(field.mul(inv, x)) for x in rows[r]]
        for rr in range(len(rows)):
            if rr != r and field.normalize(rows[rr][col]):
                f = rows[rr][col]
                rows[rr] = [field.normalize(x - field.mul(f, y))
                            for x, y in zip(rows[rr], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.convert(0)] * n
        vec[fc] = field.convert(1)
        for rr, pc in enumerate(pivots):
            vec[pc] = field.normalize(field.neg(rows[rr][fc]))
        basis.append(vec)
    return basis


def _sign_vector(vec: list, field) -> list[int] | None:
    """Normalize a nullspace vector to entries in {-1, +1}, or None."""
    ref = next((x for x in vec if field.normalize(x)), None)
    if ref is None:
        return None
    inv = field.inv(ref)
    out = []
    one = field.normalize(field.convert(1))
    minus = field.normalize(field.convert(-1))
    for x in vec:
        v = field.normalize(field.mul(inv, x))
        if v == one:
            out.append(1)
        elif v == minus:
            out.append(-1)
        else:
            return None
    return out


class RelationOracle:
    """Membership oracle: an element is a relation iff its chi5 multiple lies
    in the module spanned by the three-term relations plus the ideal layer.

    Sign patterns are decided with the first field and certified under every
    field supplied (two distinct primes by default).
    """

    def __init__(self, fields: Sequence = (GFP1, GFP2)):
        self.fields = tuple(fields)
        self.order = MonomialOrder(NVARS, rank=RANK)
        gens = [r.element for r in rel_d()] + ideal_times_free()
        self._bases = []
        for f in self.fields:
            eng = buchberger_engine([to_engine(g, self.order, f) for g in gens],
                                    self.order, f)
            self._bases.append(EngineBasis(eng, self.order, f))
        self._memo: dict = {}

    def _chi5_nf(self, base: EngineBasis, field, term_exps: tuple[int, ...],
                 comp: int, coeff: int = 1) -> dict:
        elem = ModuleElement.generator(
            NVARS, RANK, comp - 1, shifts=SHIFTS,
            coeff=GradedPoly.monomial(NVARS, _addexp(CHI5_EXPS, term_exps), coeff))
        return base.normal_form(to_engine(elem, self.order, field))

    def certify(self, element: ModuleElement) -> bool:
        """chi5 * element reduces to zero under every field."""
        chi5 = GradedPoly.monomial(NVARS, CHI5_EXPS)
        scaled = element.mul_poly(chi5)
        return all(base.contains(to_engine(scaled, self.order, f))
                   for base, f in zip(self._bases, self.fields))

    def solve_signs(self, terms: Sequence[tuple[int, tuple[int, ...]]]) -> list[int] | None:
        """Signs s with sum s_i * mono_i * T_{comp_i} a relation, or None.

        Equivalent to enumerating the sign patterns up to a global flip:
        the candidate normal forms are computed once and the unique vanishing
        combination is read off; exactly one pattern may pass.  The first
        entry is normalized to +1.
        """
        field = self.fields[0]
        vecs = [self._chi5_nf(self._bases[0], field, exps, comp)
                for comp, exps in terms]
        null = _nullspace(vecs, field)
        if len(null) != 1:
            return None
        signs = _sign_vector(null[0], field)
        if signs is None:
            return None
        if signs[0] < 0:
            signs = [-s for s in signs]
        return signs

    def build_relation(self, kind: str, indices: tuple,
                       terms: Sequence[tuple[int, tuple[int, ...]]]) -> RelationRecord:
        signs = self.solve_signs(terms)
        if signs is None:
            raise DerivationError(
                f"{kind}{indices}: no unique sign pattern passes the oracle")
        comps = {comp: GradedPoly.monomial(NVARS, exps, s)
                 for (comp, exps), s in zip(terms, signs)}
        elem = ModuleElement(
            tuple(comps.get(i, GradedPoly.zero(NVARS)) for i in range(1, 7)), SHIFTS)
        if not self.certify(elem):
            raise DerivationError(f"{kind}{indices}: certification failed")
        return RelationRecord(kind, indices, elem)


@lru_cache(maxsize=1)
def default_oracle() -> RelationOracle:
    return RelationOracle()


# ---------------------------------------------------------------------------
# Four-term and five-term relation catalogs
# ---------------------------------------------------------------------------

def extr_a(oracle: RelationOracle | None = None) -> list[RelationRecord]:
    """One four-term relation per ordered pair of distinct odd labels.

    The term for T_i squares the unique theta dividing both D(i, alpha) and
    D(alpha, beta); signs come from the oracle, normalized so the first
    term is positive.
    """
    oracle = oracle or default_oracle()
    if "extr_a" in oracle._memo:
        return oracle._memo["extr_a"]
    out = []
    for a, b in itertools.permutations(range(1, 7), 2):
        qab = set(d_entry(min(a, b), max(a, b)).quadruple)
        terms = []
        for i in (x for x in range(1, 7) if x not in (a, b)):
            qia = d_entry(min(i, a), max(i, a)).quadruple
            common = set(qia) & qab
            if len(common) != 1:
                raise DerivationError(
                    f"pair ({a},{b}), T{i}: no unique common theta {common}")
            terms.append((i, _addexp(_sq(common.pop()), _exps(qia))))
        rec = oracle.build_relation("ExtrA", (a, b), terms)
        if rec.element.degree() != 7:
            raise DerivationError(f"four-term relation ({a},{b}) has wrong degree")
        out.append(rec)
    oracle._memo["extr_a"] = out
    return out


def _balanced_blocks() -> list[tuple[frozenset[int], ...]]:
    """Blocks of one decomposition per odd label covering each even label
    exactly three times."""
    decos = {i: chars.five_term_decompositions(i) for i in range(1, 7)}
    found: list[tuple[frozenset[int], ...]] = []

    def walk(idx: int, chosen: list[frozenset[int]], counts: dict[int, int]):
        if idx == 7:
            found.append(tuple(chosen))
            return
        for d in decos[idx]:
            if any(counts[k] + 1 > 3 for k in d):
                continue
            for k in d:
                counts[k] += 1
            chosen.append(d)
            walk(idx + 1, chosen, counts)
            chosen.pop()
            for k in d:
                counts[k] -= 1

    walk(1, [], {k: 0 for k in range(1, 11)})
    return [b for b in found
            if all(sum(k in d for d in b) == 3 for k in range(1, 11))]


def _extr_b_assignments(block: Sequence[frozenset[int]], cancel: int) -> dict[int, int] | None:
    """For each surviving form the unique squared theta label, else None.

    Rule: take the three even labels in the form but not in the cancelled
    one; exactly one pair among them must appear together in none of the
    other four forms; the leftover label is the assignment.
    """
    others = [oi for oi in range(1, 7) if oi != cancel]
    out = {}
    for oi in others:
        diff = block[oi - 1] - block[cancel - 1]
        if len(diff) != 3:
            return None
        hits = []
        for pair in itertools.combinations(sorted(diff), 2):
            if all(not (set(pair) <= block[oj - 1]) for oj in others if oj != oi):
                hits.append(pair)
        if len(hits) != 1:
            return None
        out[oi] = next(iter(diff - set(hits[0])))
    return out


def sextets(oracle: RelationOracle | None = None) -> list[list[SForm]]:
    """The unique partition of the 72 five-factor forms into 12 sextets.

    Candidates are the balanced blocks; a block survives only if all six
    cancellations admit an oracle-certified five-term relation.  The search
    must produce exactly 12 blocks partitioning all 72 forms.
    """
    oracle = oracle or default_oracle()
    if "sextets" in oracle._memo:
        return oracle._memo["sextets"]
    valid = []
    for block in _balanced_blocks():
        ok = True
        for cancel in range(1, 7):
            ms = _extr_b_assignments(block, cancel)
            if ms is None:
                ok = False
                break
            terms = [(oi, _addexp(_sq(ms[oi]), _exps(sorted(block[oi - 1]))))
                     for oi in range(1, 7) if oi != cancel]
            if oracle.solve_signs(terms) is None:
                ok = False
                break
        if ok:
            valid.append(block)
    if len(valid) != 12:
        raise DerivationError(f"sextet search found {len(valid)} blocks, not 12")
    used = {(oi, d) for b in valid for oi, d in enumerate(b, 1)}
    if len(used) != 72:
        raise DerivationError("sextet blocks do not partition the 72 forms")
    valid.sort(key=lambda b: tuple(sorted(b[0])))
    out = []
    for sid, block in enumerate(valid, 1):
        out.append([SForm(oi, block[oi - 1], sid) for oi in range(1, 7)])
    oracle._memo["sextets"] = out
    return out


def extr_b(oracle: RelationOracle | None = None,
           blocks: list[list[SForm]] | None = None) -> list[RelationRecord]:
    """The 72 five-term relations: one per sextet and cancelled member."""
    oracle = oracle or default_oracle()
    if blocks is None and "extr_b" in oracle._memo:
        return oracle._memo["extr_b"]
    derived_blocks = blocks is None
    blocks = blocks if blocks is not None else sextets(oracle)
    out = []
    for block in blocks:
        sid = block[0].sextet_id
        evens = [s.even_set for s in sorted(block, key=lambda s: s.odd_index)]
        for cancel in range(1, 7):
            ms = _extr_b_assignments(evens, cancel)
            if ms is None:
                raise DerivationError(
                    f"sextet {sid}, cancel {cancel}: squared-theta rule failed")
            terms = [(oi, _addexp(_sq(ms[oi]), _exps(sorted(evens[oi - 1]))))
                     for oi in range(1, 7) if oi != cancel]
            rec = oracle.build_relation("ExtrB", (sid, cancel), terms)
            if rec.element.degree() != 8:
                raise DerivationError(
                    f"five-term relation ({sid},{cancel}) has wrong degree")
            out.append(rec)
    if derived_blocks:
        oracle._memo["extr_b"] = out
    return out


def all_relations(oracle: RelationOracle | None = None) -> list[RelationRecord]:
    oracle = oracle or default_oracle()
    return rel_d() + extr_a(oracle) + extr_b(oracle)


# ---------------------------------------------------------------------------
# The symplectic label action
# ---------------------------------------------------------------------------

def _char_action(matrix: tuple[tuple[int, ...], ...], m: chars.Characteristic) -> chars.Characteristic:
    """Affine action of an integral symplectic matrix on a characteristic."""
    A = [row[:2] for row in matrix[:2]]
    B = [row[2:] for row in matrix[:2]]
    C = [row[:2] for row in matrix[2:]]
    D = [row[2:] for row in matrix[2:]]

    def mv(X, v):
        return ((X[0][0] * v[0] + X[0][1] * v[1]) % 2,
                (X[1][0] * v[0] + X[1][1] * v[1]) % 2)

    def diag(X, Y):
        return (X[0][0] * Y[0][0] + X[0][1] * Y[0][1],
                X[1][0] * Y[1][0] + X[1][1] * Y[1][1])

    a, b = m.a, m.b
    na = tuple((x + y + z) % 2 for x, y, z in zip(mv(D, a), mv(C, b), diag(C, D)))
    nb = tuple((x + y + z) % 2 for x, y, z in zip(mv(B, a), mv(A, b), diag(A, B)))
    return chars.Characteristic(na, nb)


@lru_cache(maxsize=1)
def symplectic_label_permutations() -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All 720 label permutations induced on (even 1..10, odd 1..6).

    Generated by closing the standard symplectic generators under
    composition; each entry is (even_map, odd_map) with even_map[i-1] the
    image label of even i.
    """
    def block(A, B, C, D):
        return (tuple(A[0] + B[0]), tuple(A[1] + B[1]),
                tuple(C[0] + D[0]), tuple(C[1] + D[1]))

    I2 = [[1, 0], [0, 1]]
    Z2 = [[0, 0], [0, 0]]
    gens_m = [block(Z2, I2, I2, Z2)]
    for S in ([[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]]):
        gens_m.append(block(I2, S, Z2, I2))
    gens_m.append(block([[1, 1], [0, 1]], Z2, Z2, [[1, 0], [1, 1]]))
    gens_m.append(block([[0, 1], [1, 0]], Z2, Z2, [[0, 1], [1, 0]]))

    all_chars = chars.EVEN_CHARS + chars.ODD_CHARS
    index = {m: i for i, m in enumerate(all_chars)}
    gen_perms = []
    for M in gens_m:
        p = tuple(index[_char_action(M, m)] for m in all_chars)
        if sorted(p) != list(range(16)) or any((i < 10) != (p[i] < 10) for i in range(16)):
            raise DerivationError("symplectic generator does not permute labels")
        gen_perms.append(p)
    perms = {tuple(range(16))}
    frontier = list(perms)
    while frontier:
        new = []
        for q in frontier:
            for p in gen_perms:
                r = tuple(p[q[i]] for i in range(16))
                if r not in perms:
                    perms.add(r)
                    new.append(r)
        frontier = new
    if len(perms) != 720:
        raise DerivationError(f"label permutation group has order {len(perms)}, not 720")
    out = []
    for q in sorted(perms):
        even_map = tuple(q[i] + 1 for i in range(10))
        odd_map = tuple(q[10 + i] - 10 + 1 for i in range(6))
        out.append((even_map, odd_map))
    return tuple(out)


# ---------------------------------------------------------------------------
# The extra generator
# ---------------------------------------------------------------------------

def extr_h() -> ModuleElement:
    """The degree-5 extra generator: a two-component element over (t2 t5)."""
    numer1 = _mono([(4, 1), (6, 4), (8, 1)]) + _mono([(4, 1), (8, 1), (9, 4)])
    numer3 = _mono([(1, 1), (6, 1), (9, 1), (10, 3)], -1)
    comps = [GradedPoly.zero(NVARS)] * 6
    comps[0] = numer1
    comps[2] = numer3
    elem = ModuleElement(tuple(comps), SHIFTS)
    return monomial_divide(elem, _exps([2, 5]))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class StructureReport:
    orbit_size: int
    generated_in_intersection: bool
    intersection_in_generated: bool
    series: HilbertSeries
    series_matches: bool
    coefficients: list[int]
    extr_h_in_intersection: bool
    extr_h_outside_gradient_span: bool
    basis_fingerprints: dict

    def ok(self) -> bool:
        return (self.orbit_size == 360 and self.generated_in_intersection
                and self.intersection_in_generated and self.series_matches
                and self.extr_h_in_intersection and self.extr_h_outside_gradient_span)


GRADIENT_MODULE_SERIES = HilbertSeries((0, 6, 36, 126, 316, 606, 252, -318, -60, 60), 4, 0)


class StructurePipeline:
    """Derives the full module structure over one coefficient field.

    Heavy bases are cached on disk (content-addressed) when a cache
    directory is supplied.  All results are deterministic for a fixed field;
    pipelines over different fields are independent and may run in parallel
    processes sharing one cache directory.
    """

    def __init__(self, field=GFP1, cache_dir: str | None = None,
                 oracle: RelationOracle | None = None):
        self.field = field
        self.order = MonomialOrder(NVARS, rank=RANK)
        self.cache = BasisCache(cache_dir)
        self._oracle = oracle
        self._store: dict = {}

    # -- plumbing -----------------------------------------------------------

    def oracle(self) -> RelationOracle:
        if self._oracle is None:
            self._oracle = default_oracle()
        return self._oracle

    def _cached_basis(self, tag: str, gens: list[ModuleElement] | list[str],
                      build) -> GroebnerBasis:
        if tag in self._store:
            return self._store[tag]
        texts = [g if isinstance(g, str) else element_to_text(g) for g in gens]
        key = BasisCache.key(tag, texts, self.order, self.field)
        hit = self.cache.load(key, self.order, self.field, SHIFTS)
        if hit is None:
            elements = build()
            hit = GroebnerBasis(EngineBasis(elements, self.order, self.field), SHIFTS)
            self.cache.store(key, hit)
        self._store[tag] = hit
        return hit

    def _kernel_key_texts(self) -> list[str]:
        if "kernel_texts" not in self._store:
            self._store["kernel_texts"] = [
                element_to_text(e) for e in self.total_kernel().elements()]
        return self._store["kernel_texts"]

    def _engine(self, elems: Sequence[ModuleElement]) -> list[dict]:
        return [to_engine(e, self.order, self.field) for e in elems]

    # -- stages --------------------------------------------------------------

    def kernel_seed(self) -> GroebnerBasis:
        """Basis of the three-term module plus the ideal layer."""
        gens = [r.element for r in rel_d()] + ideal_times_free()
        return self._cached_basis(
            "k0", gens, lambda: buchberger_engine(self._engine(gens), self.order, self.field))

    def total_kernel(self) -> GroebnerBasis:
        """The full relation module: colon of the seed by the theta product."""
        seed = self.kernel_seed()
        gens = [r.element for r in rel_d()] + ideal_times_free()
        return self._cached_basis(
            "total_kernel", gens,
            lambda: module_quotient_engine(seed.engine.elements, CHI5_EXPS,
                                           self.order, self.field))

    def catalog_span(self) -> GroebnerBasis:
        """Span of the 122 catalog relations plus the ideal layer."""
        gens = [r.element for r in all_relations(self.oracle())] + ideal_times_free()
        return self._cached_basis(
            "catalog_span", gens,
            lambda: buchberger_engine(self._engine(gens), self.order, self.field))

    def completeness_check(self) -> bool:
        """The catalog span equals the colon kernel (reduced-basis equality)."""
        return self.total_kernel().same_module(self.catalog_span())

    def complement_product(self, i: int, j: int) -> tuple[int, ...]:
        quad = set(d_entry(i, j).quadruple)
        return _exps([k for k in range(1, 11) if k not in quad])

    def m_pair(self, i: int, j: int) -> GroebnerBasis:
        """Lift of the localized two-generator module: P T_i, P T_j, kernel."""
        if not 1 <= i < j <= 6:
            raise ValueError("need odd labels i < j")
        P = self.complement_product(i, j)
        extra = [ModuleElement.generator(NVARS, RANK, idx - 1, shifts=SHIFTS,
                                         coeff=GradedPoly.monomial(NVARS, P))
                 for idx in (i, j)]
        kernel = self.total_kernel()
        key = [element_to_text(e) for e in extra] + self._kernel_key_texts()
        return self._cached_basis(
            f"m_pair_{i}_{j}", key,
            lambda: buchberger_engine(self._engine(extra), self.order, self.field,
                                      seed=kernel.engine.elements))

    def chi5_m(self) -> GroebnerBasis:
        """Intersection of the fifteen localized modules."""
        pairs = list(itertools.combinations(range(1, 7), 2))
        key_gens = [element_to_text(ModuleElement.generator(
            NVARS, RANK, idx - 1, shifts=SHIFTS,
            coeff=GradedPoly.monomial(NVARS, self.complement_product(i, j))))
            for (i, j) in pairs for idx in (i, j)]
        return self._cached_basis(
            "chi5_m", key_gens + self._kernel_key_texts(),
            lambda: self._intersect_all(
                [self.m_pair(i, j).engine.elements for i, j in pairs]))

    def _intersect_all(self, mods: list[list[dict]]) -> list[dict]:
        work = sorted(mods, key=len)
        cur = work[0]
        for nxt in work[1:]:
            cur = intersect_pair_engine(cur, nxt, self.order, self.field)
        return cur

    def gradient_span(self) -> GroebnerBasis:
        """chi5-scaled gradients plus the kernel: the lift of the inner module."""
        chi5 = GradedPoly.monomial(NVARS, CHI5_EXPS)
        gens = [ModuleElement.generator(NVARS, RANK, i, shifts=SHIFTS, coeff=chi5)
                for i in range(6)]
        kernel = self.total_kernel()
        key = [element_to_text(e) for e in gens] + self._kernel_key_texts()
        return self._cached_basis(
            "gradient_span", key,
            lambda: buchberger_engine(self._engine(gens), self.order, self.field,
                                      seed=kernel.engine.elements))

    # -- the orbit -----------------------------------------------------------

    @staticmethod
    def _permute_exps(exps: Sequence[int], even_map: Sequence[int]) -> tuple[int, ...]:
        out = [0] * NVARS
        for k in range(1, 11):
            out[even_map[k - 1] - 1] = exps[k - 1]
        return tuple(out)

    def orbit_extr_h(self) -> list[ModuleElement]:
        """Projectively distinct images of the extra generator, certified.

        Each label permutation maps the three numerator monomials and the
        denominator; a candidate is kept when some coefficient combination
        of the permuted monomials has its chi5 multiple inside the
        intersection module.  The combination is recovered from the normal
        forms of the individual multiples, must be one-dimensional, and
        must have unit coefficients.  Returned elements carry their
        denominator tags; the member count is the orbit size.
        """
        if "orbit" in self._store:
            return self._store["orbit"]
        base = extr_h()
        terms = []
        for ci, p in enumerate(base.components):
            for exps, c in p.terms.items():
                terms.append((ci, exps, c))
        denom = base.denominator
        cm = self.chi5_m()
        field = self.field
        seen: dict = {}
        for even_map, odd_map in symplectic_label_permutations():
            p_denom = self._permute_exps(denom, even_map)
            clear = tuple(a - b for a, b in zip(CHI5_EXPS, p_denom))
            if any(x < 0 for x in clear):
                raise DerivationError("permuted denominator does not divide the product")
            # cleared support: the chi5 multiples decide membership and identity
            p_terms = sorted(
                (odd_map[ci] - 1, _addexp(self._permute_exps(exps, even_map), clear))
                for ci, exps, _ in terms)
            support = tuple(p_terms)
            if support in seen:
                continue
            vecs = []
            for comp, exps in p_terms:
                elem = ModuleElement.generator(
                    NVARS, RANK, comp, shifts=SHIFTS,
                    coeff=GradedPoly.monomial(NVARS, exps))
                vecs.append(cm.engine.normal_form(to_engine(elem, self.order, field)))
            null = _nullspace(vecs, field)
            if not null:
                seen[support] = None
                continue
            if len(null) > 1:
                raise DerivationError("orbit candidate admits a relation space of dim > 1")
            signs = _sign_vector(null[0], field)
            if signs is None:
                raise DerivationError("orbit candidate has non-unit coefficients")
            if signs[0] < 0:
                signs = [-s for s in signs]
            polys: dict[int, GradedPoly] = {}
            for (comp, exps), s in zip(p_terms, signs):
                numer = tuple(a - b for a, b in zip(exps, clear))
                polys[comp] = polys.get(comp, GradedPoly.zero(NVARS)) + \
                    GradedPoly.monomial(NVARS, numer, s)
            comps = tuple(polys.get(i, GradedPoly.zero(NVARS)) for i in range(6))
            seen[support] = ModuleElement(comps, SHIFTS, p_denom)
        orbit = [seen[k] for k in sorted(seen) if seen[k] is not None]
        self._store["orbit"] = orbit
        return orbit

    def generated_module(self) -> GroebnerBasis:
        """Span of the scaled gradients, the orbit multiples, and the kernel."""
        chi5 = GradedPoly.monomial(NVARS, CHI5_EXPS)
        gens = [ModuleElement.generator(NVARS, RANK, i, shifts=SHIFTS, coeff=chi5)
                for i in range(6)]
        gens += [clear_denominator(e, CHI5_EXPS) for e in self.orbit_extr_h()]
        kernel = self.total_kernel()
        key = [element_to_text(e) for e in gens] + self._kernel_key_texts()
        return self._cached_basis(
            "generated", key,
            lambda: buchberger_engine(self._engine(gens), self.order, self.field,
                                      seed=kernel.engine.elements))

    # -- series and the main check --------------------------------------------

    def module_series(self) -> HilbertSeries:
        """Series of the intersection module, shifted down by the product degree."""
        hs_kernel = self.total_kernel().hilbert_series()
        hs_cm = self.chi5_m().hilbert_series()
        return (hs_kernel - hs_cm).shifted(-10)

    def structure_report(self) -> StructureReport:
        cm = self.chi5_m()
        orbit = self.orbit_extr_h()
        gen = self.generated_module()
        chi5h = clear_denominator(extr_h(), CHI5_EXPS)
        series = self.module_series()
        reduced = series.reduced()
        matches = reduced.same_rational_function(GRADIENT_MODULE_SERIES)
        return StructureReport(
            orbit_size=len(orbit),
            generated_in_intersection=all(
                cm.engine.contains(e) for e in gen.engine.elements),
            intersection_in_generated=gen.same_module(cm),
            series=reduced,
            series_matches=matches,
            coefficients=series.expand(12)[1:],
            extr_h_in_intersection=cm.contains(chi5h),
            extr_h_outside_gradient_span=not self.gradient_span().contains(chi5h),
            basis_fingerprints={
                "total_kernel": self.total_kernel().structure_fingerprint(),
                "chi5_m": cm.structure_fingerprint(),
                "generated": gen.structure_fingerprint(),
            },
        )


def dual_prime_pipelines(cache_dir: str | None = None
                         ) -> tuple[StructurePipeline, StructurePipeline]:
    return StructurePipeline(GFP1, cache_dir), StructurePipeline(GFP2, cache_dir)


# ---------------------------------------------------------------------------
# Second-kind module presentations
# ---------------------------------------------------------------------------

PAIR_INDEX = {p: i for i, p in enumerate(itertools.combinations(range(4), 2))}
TRIPLE_INDEX = {t: i for i, t in enumerate(itertools.combinations(range(4), 3))}


def _f_var(i: int) -> GradedPoly:
    return GradedPoly.variable(4, i)


def _pair_gen(i: int, j: int, coeff: GradedPoly) -> ModuleElement:
    """coeff * B_{ij} with antisymmetry folded onto i < j generators."""
    sign = 1
    if i > j:
        i, j, sign = j, i, -1
    return ModuleElement.generator(4, 6, PAIR_INDEX[(i, j)], shifts=(2,) * 6,
                                   coeff=coeff.scale(sign))


def bracket_modules() -> dict:
    """Presentations and series of the two second-kind bracket modules.

    The symmetric-square module has six degree-2 generators B_{ij} with the
    relation family f_k B_{ij} = f_j B_{ik} + f_i B_{kj} over all index
    triples (antisymmetric, so one relation per unordered triple survives);
    the twisted module has four degree-5 generators with a single degree-6
    relation.
    """
    # relation family instantiated over all ordered triples, deduplicated
    seen = {}
    for i, j, k in itertools.permutations(range(4), 3):
        rel = _pair_gen(i, j, _f_var(k)) - _pair_gen(i, k, _f_var(j)) \
            - _pair_gen(k, j, _f_var(i))
        if rel.is_zero():
            continue
        key_terms = []
        for ci, p in enumerate(rel.components):
            for exps, c in sorted(p.terms.items()):
                key_terms.append((ci, exps, c))
        first = key_terms[0][2]
        if first < 0:
            rel = -rel
            key_terms = [(ci, e, -c) for ci, e, c in key_terms]
        seen[tuple(key_terms)] = rel
    plus_rels = [seen[k] for k in sorted(seen)]

    plus_gb = buchberger_engine(
        [to_engine(r, MonomialOrder(4, rank=6), QQ) for r in plus_rels],
        MonomialOrder(4, rank=6), QQ)
    plus_series = hilbert_series_engine(plus_gb, MonomialOrder(4, rank=6), (2,) * 6)

    minus_rel = (
        ModuleElement.generator(4, 4, TRIPLE_INDEX[(0, 1, 2)], shifts=(5,) * 4,
                                coeff=_f_var(3))
        - ModuleElement.generator(4, 4, TRIPLE_INDEX[(0, 1, 3)], shifts=(5,) * 4,
                                  coeff=_f_var(2))
        + ModuleElement.generator(4, 4, TRIPLE_INDEX[(0, 2, 3)], shifts=(5,) * 4,
                                  coeff=_f_var(1))
        - ModuleElement.generator(4, 4, TRIPLE_INDEX[(1, 2, 3)], shifts=(5,) * 4,
                                  coeff=_f_var(0)))
    minus_gb = buchberger_engine(
        [to_engine(minus_rel, MonomialOrder(4, rank=4), QQ)],
        MonomialOrder(4, rank=4), QQ)
    minus_series = hilbert_series_engine(minus_gb, MonomialOrder(4, rank=4), (5,) * 4)

    return {
        "plus": {
            "generators": [f"B{i}{j}" for i, j in itertools.combinations(range(4), 2)],
            "relations": plus_rels,
            "series": plus_series,
            "dimensions": plus_series.expand(8),
        },
        "minus": {
            "generators": [f"C{i}{j}{k}" for i, j, k in itertools.combinations(range(4), 3)],
            "relations": [minus_rel],
            "series": minus_series,
            "dimensions": minus_series.expand(8),
        },
    }


# ---------------------------------------------------------------------------
# Catalog JSON
# ---------------------------------------------------------------------------

def catalog_json(which: str, oracle: RelationOracle | None = None) -> dict:
    """Build the requested catalog with per-entry verification status."""
    if which == "chars":
        return chars.catalog()
    if which == "riemann":
        return {"quartics": [poly_to_text(q) for q in riemann_ideal()]}
    if which == "dtable":
        return {"entries": [
            {"pair": list(e.pair), "quadruple": list(e.quadruple), "sign": e.sign,
             "cross_checked": e.quadruple == chars.azygetic_quadruple(*e.pair)}
            for e in d_table()]}
    if which == "reld":
        return {"relations": [
            {"indices": list(r.indices), "element": element_to_text(r.element)}
            for r in rel_d()]}
    oracle = oracle or default_oracle()
    if which == "extra":
        return {"relations": [
            {"indices": list(r.indices), "element": element_to_text(r.element),
             "certified": True}
            for r in extr_a(oracle)]}
    if which == "sextets":
        return {"blocks": [
            [{"odd": s.odd_index, "evens": sorted(s.even_set)} for s in block]
            for block in sextets(oracle)]}
    if which == "extrb":
        return {"relations": [
            {"sextet": r.indices[0], "cancelled": r.indices[1],
             "element": element_to_text(r.element), "certified": True}
            for r in extr_b(oracle)]}
    raise ValueError(f"unknown catalog {which!r}")
