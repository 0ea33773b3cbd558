"""Buchberger engine for ideals and submodules of free modules.

Monomials are packed into single integers whose natural ordering realizes
graded reverse lexicographic comparison; multiplying by a monomial is an
integer addition and divisibility is a guard-bit subtraction test.  Module
terms append the component to the packed key, giving term-over-position
with ascending generator index as tie break; position-over-term and block
orders for eliminations reuse the same machinery.

The engine provides reduced Groebner bases, normal forms, module quotients
(colon), intersections via a degree-zero tag variable, syzygy-based kernels
of presentation maps, and Hilbert series of graded quotients computed from
lead-term modules.

Coefficients are exact rationals by default; a word-sized prime field is
available to accelerate large runs.  Any result that matters is confirmed
either over the rationals or over two distinct primes.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import defaultdict
from fractions import Fraction
from heapq import heapify, heappop, heappush
from typing import Iterable, Sequence

from .symbolic import (
    GradedPoly,
    HilbertSeries,
    ModuleElement,
    element_from_text,
    element_to_text,
)

# ---------------------------------------------------------------------------
# Coefficient fields
# ---------------------------------------------------------------------------

PRIME1 = 2147483647
PRIME2 = 2147483629


class RationalField:
    """Exact rational coefficients."""

    p = None
    name = "q"

    def convert(self, c) -> Fraction:
        return Fraction(c)

    def normalize(self, c):
        return c

    def inv(self, c):
        return 1 / c

    def neg(self, c):
        return -c

    def mul(self, a, b):
        return a * b

    def lift(self, c) -> Fraction:
        return c

    def __repr__(self):
        return "QQ"


class PrimeField:
    """Integers modulo a word-sized prime."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"p{p}"

    def convert(self, c):
        c = Fraction(c)
        den = c.denominator % self.p
        if den == 0:
            raise ZeroDivisionError("denominator vanishes modulo p")
        return c.numerator * pow(den, self.p - 2, self.p) % self.p

    def normalize(self, c):
        return c % self.p

    def inv(self, c):
        return pow(c, self.p - 2, self.p)

    def neg(self, c):
        return (-c) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def lift(self, c) -> Fraction:
        """Symmetric representative; exact for small catalog coefficients."""
        return Fraction(c - self.p if 2 * c > self.p else c)

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()
GFP1 = PrimeField(PRIME1)
GFP2 = PrimeField(PRIME2)

FIELDS = {"q": QQ, "p1": GFP1, "p2": GFP2}


# ---------------------------------------------------------------------------
# Monomial orders and packed keys
# ---------------------------------------------------------------------------

_B = 8                   # bits per exponent block
_C = 1 << 6              # exponent blocks store C - e; exponents must stay < C
_GUARD = 1 << (_B - 1)
_BMASK = (1 << _B) - 1
_CB = 8                  # bits for the component suffix
_CMAX = (1 << _CB) - 1


class MonomialOrder:
    """Graded reverse lexicographic order with optional rotation and blocks.

    nvars counts the ring variables (tags excluded).  varseq permutes them;
    the final entry is the revlex-last variable, which makes colon-by-a-
    variable computations a basis rewrite.  Tag variables dominate every
    comparison (elimination blocks).  style "top" is term-over-position with
    ascending generator index as tie break; "pot" is position-over-term.
    With fblock = r, components below r dominate the others as a block,
    which is how syzygies are read off.
    """

    def __init__(self, nvars: int, rank: int = 1, varseq: Sequence[int] | None = None,
                 ntags: int = 0, style: str = "top", fblock: int = 0):
        if style not in ("top", "pot"):
            raise ValueError("style must be 'top' or 'pot'")
        if rank > _CMAX:
            raise ValueError("rank too large for key packing")
        self.nvars = nvars
        self.rank = rank
        self.ntags = ntags
        self.style = style
        self.fblock = fblock
        self.varseq = tuple(varseq) if varseq is not None else tuple(range(nvars))
        if sorted(self.varseq) != list(range(nvars)):
            raise ValueError("varseq must be a permutation of the variables")
        k = nvars
        self.mono_bits = _B * (k + 1 + ntags)
        self._pos = [0] * k
        for blk, v in enumerate(self.varseq):
            self._pos[v] = blk
        self._deg_shift = _B * k
        self._tag_shift = [_B * (k + 1 + t) for t in range(ntags)]
        self.offset = sum(_C << (_B * j) for j in range(k))
        self._xmask = (1 << (_B * k)) - 1
        self._gx = sum(_GUARD << (_B * j) for j in range(k))
        self._gt = sum(_GUARD << s for s in self._tag_shift)
        self._tmask = sum(_BMASK << s for s in self._tag_shift)
        self.one = self.offset
        self.descriptor = (nvars, rank, self.varseq, ntags, style, fblock)

    # -- packing -------------------------------------------------------------

    def encode_mono(self, exps: Sequence[int]) -> int:
        """Pack an exponent vector (ring variables then tags) into an int."""
        if len(exps) != self.nvars + self.ntags:
            raise ValueError("exponent vector has wrong length")
        enc = 0
        deg = 0
        for v in range(self.nvars):
            e = exps[v]
            if not 0 <= e < _C:
                raise ValueError(f"exponent {e} out of packing range")
            enc += (_C - e) << (_B * self._pos[v])
            deg += e
        if deg > _BMASK:
            raise ValueError("total degree out of packing range")
        enc += deg << self._deg_shift
        for t in range(self.ntags):
            e = exps[self.nvars + t]
            if not 0 <= e < _C:
                raise ValueError(f"tag exponent {e} out of packing range")
            enc += e << self._tag_shift[t]
        return enc

    def decode_mono(self, enc: int) -> tuple[int, ...]:
        exps = [0] * (self.nvars + self.ntags)
        for v in range(self.nvars):
            exps[v] = _C - ((enc >> (_B * self._pos[v])) & _BMASK)
        for t in range(self.ntags):
            exps[self.nvars + t] = (enc >> self._tag_shift[t]) & _BMASK
        return tuple(exps)

    def mono_degree(self, enc: int) -> int:
        return (enc >> self._deg_shift) & _BMASK

    def tag_free(self, enc: int) -> bool:
        return not (enc & self._tmask)

    def mono_mul(self, a: int, b: int) -> int:
        return a + b - self.offset

    def mono_divides(self, a: int, b: int) -> bool:
        """True when monomial a divides monomial b."""
        xa = a & self._xmask
        xb = b & self._xmask
        if ((xa | self._gx) - xb) & self._gx != self._gx:
            return False
        if self.ntags:
            ta = a & self._tmask
            tb = b & self._tmask
            return ((tb | self._gt) - ta) & self._gt == self._gt
        return True

    def mono_lcm(self, a: int, b: int) -> int:
        ea = self.decode_mono(a)
        eb = self.decode_mono(b)
        return self.encode_mono(tuple(max(x, y) for x, y in zip(ea, eb)))

    # -- module term keys ------------------------------------------------------

    def term_key(self, enc: int, comp: int) -> int:
        if not 0 <= comp < self.rank:
            raise ValueError(f"component {comp} out of range")
        if self.style == "pot":
            return ((_CMAX - comp) << self.mono_bits) | enc
        key = (enc << _CB) | (_CMAX - comp)
        if self.fblock and comp < self.fblock:
            key |= 1 << (self.mono_bits + _CB)
        return key

    def split_key(self, key: int) -> tuple[int, int]:
        if self.style == "pot":
            return key & ((1 << self.mono_bits) - 1), _CMAX - (key >> self.mono_bits)
        comp = _CMAX - (key & _CMAX)
        enc = (key >> _CB) & ((1 << self.mono_bits) - 1)
        return enc, comp

    def key_mul_delta(self, enc_factor: int) -> int:
        """Additive key delta that multiplies a term by the given monomial."""
        d = enc_factor - self.offset
        return d if self.style == "pot" else d << _CB

    def with_varseq(self, varseq: Sequence[int]) -> "MonomialOrder":
        return MonomialOrder(self.nvars, self.rank, varseq, self.ntags,
                             self.style, self.fblock)

    def variant(self, **kw) -> "MonomialOrder":
        args = dict(nvars=self.nvars, rank=self.rank, varseq=self.varseq,
                    ntags=self.ntags, style=self.style, fblock=self.fblock)
        args.update(kw)
        if "varseq" not in kw and args["nvars"] != self.nvars:
            args["varseq"] = None
        return MonomialOrder(**args)

    def __repr__(self):
        return f"MonomialOrder{self.descriptor}"


def convert_element(elem: dict, src: MonomialOrder, dst: MonomialOrder,
                    comp_offset: int = 0) -> dict:
    """Re-encode an engine element between orders."""
    out = {}
    for key, c in elem.items():
        enc, comp = src.split_key(key)
        exps = src.decode_mono(enc)
        if dst.ntags < src.ntags:
            if any(exps[src.nvars + t] for t in range(src.ntags)):
                raise ValueError("cannot drop nonzero tag exponents")
            exps = exps[: src.nvars] + (0,) * dst.ntags
        elif dst.ntags > src.ntags:
            exps = exps + (0,) * (dst.ntags - src.ntags)
        out[dst.term_key(dst.encode_mono(exps), comp + comp_offset)] = c
    return out


# ---------------------------------------------------------------------------
# Engine elements and rows
# ---------------------------------------------------------------------------

def to_engine(e: ModuleElement | GradedPoly, order: MonomialOrder, field) -> dict:
    """Convert a symbolic element to the packed-term representation."""
    if isinstance(e, GradedPoly):
        comps: Sequence[GradedPoly] = [e]
    else:
        if e.denominator is not None:
            raise ValueError("cannot convert an element carrying a denominator tag")
        comps = e.components
    out: dict = {}
    pad = (0,) * order.ntags
    for ci, p in enumerate(comps):
        for exps, c in p.terms.items():
            v = field.convert(c)
            if v:
                out[order.term_key(order.encode_mono(exps + pad), ci)] = v
    return out


def from_engine(elem: dict, order: MonomialOrder, field,
                shifts: Sequence[int] | None = None) -> ModuleElement:
    """Convert back to a symbolic element, lifting coefficients via the field."""
    rank = order.rank
    comps: list[dict] = [dict() for _ in range(rank)]
    for key, c in elem.items():
        enc, comp = order.split_key(key)
        exps = order.decode_mono(enc)[: order.nvars]
        comps[comp][exps] = field.lift(c)
    polys = tuple(GradedPoly(order.nvars, t) for t in comps)
    shifts = tuple(shifts) if shifts is not None else (1,) * rank
    return ModuleElement(polys, shifts)


class _Row:
    __slots__ = ("key", "enc", "comp", "tail", "index")

    def __init__(self, key, enc, comp, tail, index):
        self.key = key
        self.enc = enc
        self.comp = comp
        self.tail = tail
        self.index = index


def _make_row(elem: dict, order: MonomialOrder, field, index: int) -> _Row:
    key = max(elem)
    inv = field.inv(elem[key])
    items = sorted(elem.items(), reverse=True)
    tail = [(k, field.normalize(field.mul(inv, c))) for k, c in items[1:]]
    enc, comp = order.split_key(key)
    return _Row(key, enc, comp, tail, index)


def _row_element(row: _Row, field) -> dict:
    elem = {row.key: field.convert(1)}
    elem.update(row.tail)
    return elem


def _normal_form(elem: dict, rows_by_comp, order: MonomialOrder, field) -> dict:
    """Full tail-reduced remainder of elem modulo the given rows."""
    if not elem:
        return {}
    split = order.split_key
    divides = order.mono_divides
    kdelta = order.key_mul_delta
    normalize = field.normalize
    mul = field.mul
    neg = field.neg
    offset = order.offset
    out: dict = {}
    heap = [(-k, c) for k, c in elem.items()]
    heapify(heap)
    while heap:
        nk, c = heappop(heap)
        while heap and heap[0][0] == nk:
            c = c + heappop(heap)[1]
        c = normalize(c)
        if not c:
            continue
        key = -nk
        enc, comp = split(key)
        row = None
        for r in rows_by_comp.get(comp, ()):
            if divides(r.enc, enc):
                row = r
                break
        if row is None:
            out[key] = c
            continue
        delta = kdelta(enc - row.enc + offset)
        nc = neg(c)
        for tk, tc in row.tail:
            heappush(heap, (-(tk + delta), mul(nc, tc)))
    return out


def _spoly(ri: _Row, rj: _Row, lcm_enc: int, order: MonomialOrder, field) -> dict:
    """S-element of two monic rows with equal lead component."""
    di = order.key_mul_delta(lcm_enc - ri.enc + order.offset)
    dj = order.key_mul_delta(lcm_enc - rj.enc + order.offset)
    out: dict = {}
    for k, c in ri.tail:
        out[k + di] = c
    for k, c in rj.tail:
        kk = k + dj
        v = field.normalize(out.get(kk, 0) - c)
        if v:
            out[kk] = v
        else:
            out.pop(kk, None)
    return out


# ---------------------------------------------------------------------------
# Buchberger with Gebauer-Moeller pair pruning
# ---------------------------------------------------------------------------

_VERBOSE = bool(os.environ.get("THETA2_GB_VERBOSE"))


def _update_pairs(rows, pairs, new: _Row, order: MonomialOrder):
    lcm = order.mono_lcm
    mul = order.mono_mul
    divides = order.mono_divides
    t = new.index
    keep = []
    for entry in pairs:
        lk, i, j = entry
        if (rows[i].comp == new.comp and divides(new.enc, lk)
                and lcm(rows[i].enc, new.enc) != lk
                and lcm(rows[j].enc, new.enc) != lk):
            continue
        keep.append(entry)
    pairs[:] = keep
    heapify(pairs)
    cand: dict[int, int] = {}
    for r in rows[:-1]:
        if r.comp == new.comp:
            cand[r.index] = lcm(r.enc, new.enc)
    drop: set[int] = set()
    items = sorted(cand.items(), key=lambda kv: (kv[1], kv[0]))
    # M rule: drop lcms strictly divided by an earlier one
    for a, (i, li) in enumerate(items):
        for j, lj in items[:a]:
            if j not in drop and lj != li and divides(lj, li):
                drop.add(i)
                break
    # F rule: a single representative among equal lcms
    seen: dict[int, int] = {}
    for i, li in items:
        if i in drop:
            continue
        if li in seen:
            drop.add(i)
        else:
            seen[li] = i
    # product criterion, valid for ideals only
    if order.rank == 1:
        for i, li in items:
            if i not in drop and li == mul(rows[i].enc, new.enc):
                drop.add(i)
    for i, li in items:
        if i not in drop:
            heappush(pairs, (li, i, t))


def buchberger_engine(gens: Iterable[dict], order: MonomialOrder, field,
                      seed: list[dict] | None = None) -> list[dict]:
    """Reduced Groebner basis of the submodule generated by gens (and seed).

    seed may hold an already-computed Groebner basis under the same order
    and field; its internal S-pairs are skipped.  Returns element dicts
    sorted by ascending lead key; generators appearing as zero are dropped.
    """
    rows: list[_Row] = []
    rows_by_comp: dict[int, list[_Row]] = defaultdict(list)
    pairs: list[tuple[int, int, int]] = []

    def insert(elem: dict, update: bool) -> None:
        row = _make_row(elem, order, field, len(rows))
        rows.append(row)
        bucket = rows_by_comp[row.comp]
        bucket.append(row)
        bucket.sort(key=lambda r: r.key)
        if update:
            _update_pairs(rows, pairs, row, order)

    if seed:
        for elem in seed:
            if elem:
                insert(elem, update=False)
    queue = sorted((e for e in gens if e), key=max)
    for elem in queue:
        red = _normal_form(elem, rows_by_comp, order, field)
        if red:
            insert(red, update=True)

    done = 0
    while pairs:
        lk, i, j = heappop(pairs)
        red = _normal_form(_spoly(rows[i], rows[j], lk, order, field),
                           rows_by_comp, order, field)
        done += 1
        if red:
            insert(red, update=True)
        if _VERBOSE and done % 500 == 0:
            print(f"    [gb] pairs {done}, queued {len(pairs)}, rows {len(rows)}",
                  flush=True)

    return _interreduce(rows, order, field)


def _interreduce(rows: list[_Row], order: MonomialOrder, field) -> list[dict]:
    """Drop redundant leads, tail-reduce the survivors, sort by lead key."""
    minimal: list[_Row] = []
    for row in sorted(rows, key=lambda r: r.key):
        if not any(r.comp == row.comp and order.mono_divides(r.enc, row.enc)
                   for r in minimal):
            minimal.append(row)
    by_comp: dict[int, list[_Row]] = defaultdict(list)
    for r in minimal:
        by_comp[r.comp].append(r)
    out = []
    for row in minimal:
        others = {c: [r for r in rs if r is not row] for c, rs in by_comp.items()}
        tail = _normal_form(dict(row.tail), others, order, field)
        red = {row.key: field.convert(1)}
        red.update(tail)
        out.append(red)
    out.sort(key=max)
    return out


# ---------------------------------------------------------------------------
# Prepared bases
# ---------------------------------------------------------------------------

class EngineBasis:
    """A reduced basis prepared for fast repeated normal forms."""

    def __init__(self, elements: list[dict], order: MonomialOrder, field):
        self.elements = elements
        self.order = order
        self.field = field
        self._rows_by_comp: dict[int, list[_Row]] = defaultdict(list)
        for i, e in enumerate(elements):
            row = _make_row(e, order, field, i)
            self._rows_by_comp[row.comp].append(row)
        for bucket in self._rows_by_comp.values():
            bucket.sort(key=lambda r: r.key)

    def normal_form(self, elem: dict) -> dict:
        return _normal_form(elem, self._rows_by_comp, self.order, self.field)

    def contains(self, elem: dict) -> bool:
        return not self.normal_form(elem)

    def lead_terms(self) -> list[tuple[int, int]]:
        return sorted((r.enc, c) for c, rs in self._rows_by_comp.items() for r in rs)

    def structure(self) -> list[list[tuple[tuple[int, ...], int]]]:
        """Coefficient-free support shape, comparable across coefficient fields."""
        shape = []
        for e in self.elements:
            terms = sorted(e, reverse=True)
            shape.append([
                (self.order.decode_mono(self.order.split_key(k)[0]),
                 self.order.split_key(k)[1]) for k in terms])
        return shape


# ---------------------------------------------------------------------------
# Module operations
# ---------------------------------------------------------------------------

def colon_by_variable(gens: list[dict], var: int, order: MonomialOrder, field,
                      seed: list[dict] | None = None) -> tuple[list[dict], MonomialOrder]:
    """Generators of (M : x_var) for homogeneous M, via a rotated basis.

    Returns the new basis together with the rotated order it lives in.  In
    graded reverse lex with x_var last, a homogeneous element whose lead is
    divisible by x_var is divisible termwise, so the colon is a rewrite of
    the Groebner basis.
    """
    seq = tuple(v for v in order.varseq if v != var) + (var,)
    rorder = order.with_varseq(seq)
    rgens = [convert_element(e, order, rorder) for e in gens]
    rseed = [convert_element(e, order, rorder) for e in seed] if seed else None
    basis = buchberger_engine(rgens, rorder, field, seed=rseed)
    block = _B * rorder._pos[var]
    vbit = 1 << block
    # dividing by x_var: exponent block gains 1 (stored as C - e), degree drops 1
    delta = vbit - (1 << rorder._deg_shift)
    if rorder.style != "pot":
        delta <<= _CB
    out = []
    for e in basis:
        lead = max(e)
        enc, _ = rorder.split_key(lead)
        if _C - ((enc >> block) & _BMASK) >= 1:
            out.append({k + delta: c for k, c in e.items()})
        else:
            out.append(e)
    return out, rorder


def module_quotient_engine(gens: list[dict], mono_exps: Sequence[int],
                           order: MonomialOrder, field) -> list[dict]:
    """Reduced basis of (M : m) for a monomial m, iterating colon by variable."""
    cur, cur_order = gens, order
    for var, e in enumerate(mono_exps):
        for _ in range(e):
            cur, cur_order = colon_by_variable(cur, var, cur_order, field)
    final = [convert_element(x, cur_order, order) for x in cur]
    if cur_order.descriptor == order.descriptor:
        # a full rotation cycle lands back on the input order; still a basis
        return buchberger_engine([], order, field, seed=final)
    return buchberger_engine(final, order, field)


def syzygy_engine(targets: list[dict], kernel_of: list[dict], order: MonomialOrder,
                  field) -> list[dict]:
    """Generators of {c in R^s : sum c_i targets_i in <kernel_of>}.

    targets live in a rank-r free module; the result lives in rank s = number
    of targets.  Computed with a block order in rank r + s where the first
    block dominates, so basis elements supported purely in the second block
    are exactly the syzygies.
    """
    r = order.rank
    s = len(targets)
    ext = MonomialOrder(order.nvars, rank=r + s, varseq=order.varseq,
                        ntags=order.ntags, style="top", fblock=r)
    gens = []
    for i, tgt in enumerate(targets):
        e = convert_element(tgt, order, ext)
        e[ext.term_key(ext.one, r + i)] = field.convert(1)
        gens.append(e)
    for kg in kernel_of:
        gens.append(convert_element(kg, order, ext))
    basis = buchberger_engine(gens, ext, field)
    sy_order = MonomialOrder(order.nvars, rank=s, varseq=order.varseq,
                             ntags=order.ntags, style="top")
    out = []
    for e in basis:
        _, comp = ext.split_key(max(e))
        if comp >= r:
            out.append(convert_element(e, ext, sy_order, comp_offset=-r))
    return out


def intersect_pair_engine(a: list[dict], b: list[dict], order: MonomialOrder,
                          field) -> list[dict]:
    """Generators of <a> intersect <b> via one degree-zero tag variable."""
    ext = order.variant(ntags=1)
    tag_delta = 1 << ext._tag_shift[0]
    if ext.style != "pot":
        tag_delta <<= _CB
    gens = []
    for e in a:
        ee = convert_element(e, order, ext)
        gens.append({k + tag_delta: c for k, c in ee.items()})
    for e in b:
        ee = convert_element(e, order, ext)
        g = dict(ee)
        for k, c in ee.items():
            kk = k + tag_delta
            v = field.normalize(g.get(kk, 0) - c)
            if v:
                g[kk] = v
            else:
                g.pop(kk, None)
        gens.append(g)
    basis = buchberger_engine(gens, ext, field)
    out = []
    for e in basis:
        enc, _ = ext.split_key(max(e))
        if ext.tag_free(enc):
            out.append(convert_element(e, ext, order))
    # the tag-free slice of the elimination basis is a basis in the plain order
    return buchberger_engine([], order, field, seed=out)


def intersect_engine(mods: list[list[dict]], order: MonomialOrder, field) -> list[dict]:
    """Fold pairwise intersections over the inputs, smallest bases first."""
    if not mods:
        raise ValueError("need at least one submodule")
    work = sorted(mods, key=len)
    cur = work[0]
    if len(work) == 1:
        return buchberger_engine(cur, order, field)
    for nxt in work[1:]:
        cur = intersect_pair_engine(cur, nxt, order, field)
    return cur


# ---------------------------------------------------------------------------
# Hilbert series from lead terms
# ---------------------------------------------------------------------------

def _minimalize_monos(gens: set[tuple[int, ...]]) -> tuple[tuple[int, ...], ...]:
    out = []
    for g in sorted(gens, key=lambda e: (sum(e), e)):
        if not any(all(x <= y for x, y in zip(h, g)) for h in out):
            out.append(g)
    return tuple(out)


def _hilbert_numerator(gens: tuple[tuple[int, ...], ...], memo: dict) -> dict[int, int]:
    """Numerator of HS(R/I) over (1-t)^nvars for a monomial ideal I."""
    if not gens:
        return {0: 1}
    key = gens
    hit = memo.get(key)
    if hit is not None:
        return hit
    if any(sum(g) == 0 for g in gens):
        memo[key] = {}
        return {}
    # pure power products multiply out directly
    if all(sum(1 for x in g if x) == 1 for g in gens):
        out = {0: 1}
        for g in gens:
            d = sum(g)
            nxt: dict[int, int] = {}
            for i, c in out.items():
                nxt[i] = nxt.get(i, 0) + c
                nxt[i + d] = nxt.get(i + d, 0) - c
            out = {i: c for i, c in nxt.items() if c}
        memo[key] = out
        return out
    # pivot must occur in a mixed generator, else both branches can stall
    counts: dict[int, int] = defaultdict(int)
    for g in gens:
        if sum(1 for x in g if x) >= 2:
            for v, e in enumerate(g):
                if e:
                    counts[v] += 1
    pivot = max(counts, key=lambda v: (counts[v], -v))
    pv = tuple(1 if v == pivot else 0 for v in range(len(gens[0])))
    plus = _minimalize_monos({g for g in gens if g[pivot] == 0} | {pv})
    colon = _minimalize_monos(
        {tuple(e - 1 if v == pivot and e else e for v, e in enumerate(g)) for g in gens})
    h_plus = _hilbert_numerator(plus, memo)
    h_colon = _hilbert_numerator(colon, memo)
    out = dict(h_plus)
    for i, c in h_colon.items():
        v = out.get(i + 1, 0) + c
        if v:
            out[i + 1] = v
        else:
            out.pop(i + 1, None)
    memo[key] = out
    return out


def hilbert_series_engine(basis: list[dict], order: MonomialOrder,
                          shifts: Sequence[int]) -> HilbertSeries:
    """Hilbert series of F/S from the lead-term module of a Groebner basis.

    Requires a degree-compatible order (no tags).  The shifts give the
    degrees of the free-module generators.
    """
    if order.ntags:
        raise ValueError("hilbert series needs a degree-compatible order")
    per_comp: dict[int, set[tuple[int, ...]]] = defaultdict(set)
    for e in basis:
        enc, comp = order.split_key(max(e))
        per_comp[comp].add(order.decode_mono(enc))
    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 100000))
    try:
        memo: dict = {}
        total: dict[int, int] = defaultdict(int)
        for comp in range(order.rank):
            gens = _minimalize_monos(per_comp.get(comp, set()))
            num = _hilbert_numerator(gens, memo)
            s = shifts[comp]
            for i, c in num.items():
                total[i + s] += c
    finally:
        sys.setrecursionlimit(limit)
    return HilbertSeries.from_coeffs({i: c for i, c in total.items() if c},
                                     denom_exp=order.nvars)


# ---------------------------------------------------------------------------
# Public wrappers over symbolic types
# ---------------------------------------------------------------------------

class GroebnerBasis:
    """Reduced Groebner basis of a submodule, with its order and field."""

    def __init__(self, engine: EngineBasis, shifts: tuple[int, ...]):
        self.engine = engine
        self.shifts = shifts
        self.reduced = True

    @property
    def order(self) -> MonomialOrder:
        return self.engine.order

    @property
    def field(self):
        return self.engine.field

    def __len__(self):
        return len(self.engine.elements)

    def elements(self) -> list[ModuleElement]:
        return [from_engine(e, self.order, self.field, self.shifts)
                for e in self.engine.elements]

    def normal_form(self, e: ModuleElement | GradedPoly) -> ModuleElement:
        nf = self.engine.normal_form(to_engine(e, self.order, self.field))
        return from_engine(nf, self.order, self.field, self.shifts)

    def contains(self, e: ModuleElement | GradedPoly) -> bool:
        return self.engine.contains(to_engine(e, self.order, self.field))

    def hilbert_series(self) -> HilbertSeries:
        return hilbert_series_engine(self.engine.elements, self.order, self.shifts)

    def structure_fingerprint(self) -> str:
        blob = json.dumps(self.engine.structure(), separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def same_module(self, other: "GroebnerBasis") -> bool:
        """Equality of reduced bases, including coefficients, same order/field."""
        if self.order.descriptor != other.order.descriptor:
            raise ValueError("bases use different orders")
        return self.engine.elements == other.engine.elements


def _default_order(items: Sequence[ModuleElement | GradedPoly]) -> tuple[MonomialOrder, tuple[int, ...]]:
    first = items[0]
    if isinstance(first, GradedPoly):
        return MonomialOrder(first.nvars, rank=1), (0,)
    return MonomialOrder(first.nvars, rank=first.rank), tuple(first.shifts)


def buchberger(gens: Sequence[ModuleElement | GradedPoly],
               order: MonomialOrder | None = None,
               field=QQ,
               shifts: Sequence[int] | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by gens."""
    if not gens:
        raise ValueError("need at least one generator (possibly zero)")
    if order is None:
        order, inferred = _default_order(gens)
        shifts = tuple(shifts) if shifts is not None else inferred
    else:
        shifts = tuple(shifts) if shifts is not None else (1,) * order.rank
    engine_gens = [to_engine(g, order, field) for g in gens]
    basis = buchberger_engine(engine_gens, order, field)
    return GroebnerBasis(EngineBasis(basis, order, field), shifts)


def normal_form(e: ModuleElement | GradedPoly, gb: GroebnerBasis) -> ModuleElement:
    return gb.normal_form(e)


def module_quotient(gb: GroebnerBasis, f: GradedPoly) -> GroebnerBasis:
    """(M : f) = all T with f*T in M."""
    if f.is_zero():
        raise ValueError("colon by zero")
    order, field = gb.order, gb.field
    if len(f.terms) == 1:
        ((exps, _),) = f.terms.items()
        basis = module_quotient_engine(gb.engine.elements, exps, order, field)
    else:
        if order.ntags or order.fblock or order.style != "top":
            raise ValueError("general colon needs the plain ambient order")
        targets = [to_engine(ModuleElement.generator(
            f.nvars, order.rank, i, shifts=gb.shifts, coeff=f), order, field)
            for i in range(order.rank)]
        syz = syzygy_engine(targets, gb.engine.elements, order, field)
        basis = buchberger_engine([], order, field, seed=syz)
    return GroebnerBasis(EngineBasis(basis, order, field), gb.shifts)


def intersect(subs: Sequence[GroebnerBasis]) -> GroebnerBasis:
    """Intersection of submodules given by their Groebner bases."""
    if not subs:
        raise ValueError("need at least one submodule")
    first = subs[0]
    for s in subs[1:]:
        if s.order.descriptor != first.order.descriptor:
            raise ValueError("submodules live in different ambient orders")
    basis = intersect_engine([s.engine.elements for s in subs],
                             first.order, first.field)
    return GroebnerBasis(EngineBasis(basis, first.order, first.field), first.shifts)


def kernel_of_presentation_map(targets: Sequence[ModuleElement],
                               modulo: GroebnerBasis | None = None,
                               field=None) -> GroebnerBasis:
    """Syzygies of the targets inside F/K: kernel of e_i -> targets_i.

    modulo supplies K by its Groebner basis; None means K = 0.
    """
    if not targets:
        raise ValueError("need at least one target")
    rank = targets[0].rank
    order = MonomialOrder(targets[0].nvars, rank=rank)
    if modulo is not None:
        order = modulo.order
        field = field or modulo.field
        kern = modulo.engine.elements
    else:
        field = field or QQ
        kern = []
    tgt = [to_engine(t, order, field) for t in targets]
    syz = syzygy_engine(tgt, kern, order, field)
    sy_order = MonomialOrder(order.nvars, rank=len(targets), varseq=order.varseq)
    basis = buchberger_engine([], sy_order, field, seed=syz)
    shifts = tuple(t.degree() if not t.is_zero() else 0 for t in targets)
    return GroebnerBasis(EngineBasis(basis, sy_order, field), shifts)


def hilbert_series(gb: GroebnerBasis, shifts: Sequence[int] | None = None) -> HilbertSeries:
    return hilbert_series_engine(gb.engine.elements, gb.order,
                                 tuple(shifts) if shifts is not None else gb.shifts)


# ---------------------------------------------------------------------------
# Disk cache for reduced bases
# ---------------------------------------------------------------------------

class BasisCache:
    """Content-addressed store of reduced bases, keyed by generators+order+field."""

    def __init__(self, directory: str | None):
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    @staticmethod
    def key(tag: str, gens_text: Sequence[str], order: MonomialOrder, field) -> str:
        blob = json.dumps({
            "tag": tag,
            "gens": sorted(gens_text),
            "order": order.descriptor,
            "field": field.name,
        }, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, key: str) -> str:
        return os.path.join(self.directory, key + ".json")

    def load(self, key: str, order: MonomialOrder, field,
             shifts: tuple[int, ...]) -> GroebnerBasis | None:
        if not self.directory:
            return None
        path = self.path(key)
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            payload = json.load(fh)
        elems = []
        for line in payload["elements"]:
            me = element_from_text(line, order.nvars, order.rank,
                                   shifts=(1,) * order.rank)
            elems.append(to_engine(me, order, field))
        return GroebnerBasis(EngineBasis(elems, order, field), shifts)

    def store(self, key: str, gb: GroebnerBasis) -> None:
        if not self.directory:
            return
        lines = [element_to_text(e) for e in gb.elements()]
        with open(self.path(key), "w") as fh:
            json.dump({"elements": lines}, fh)
