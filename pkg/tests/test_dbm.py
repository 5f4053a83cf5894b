import random
from fractions import Fraction

import numpy as np
import pytest

from ptpn import DBM, canonicalize
from ptpn.dbm import INF_RAW, add, decode, encode, scale_for
from ptpn.model import Bound


def fm_feasible(n, constraints):
    """Fourier-Motzkin over x_1..x_{n-1} with x_0 = 0.

    ``constraints`` are ``(i, j, Bound)`` meaning ``x_i - x_j <= / < value``.
    Each inequality is kept as ``(coeffs, const, strict)`` for
    ``sum coeffs[k] * x_k  (<|<=)  const``.
    """
    rows = []
    for i, j, b in constraints:
        if b.value is None:
            continue
        co = {}
        if i:
            co[i] = co.get(i, 0) + 1
        if j:
            co[j] = co.get(j, 0) - 1
        co = {k: Fraction(v) for k, v in co.items() if v}
        rows.append((co, Fraction(b.value), b.strict))
    for v in range(1, n):
        pos = [r for r in rows if r[0].get(v, 0) > 0]
        neg = [r for r in rows if r[0].get(v, 0) < 0]
        rest = [r for r in rows if r[0].get(v, 0) == 0]
        for cp, kp, sp in pos:
            for cn, kn, sn in neg:
                a, b = cp[v], -cn[v]
                co = {}
                for k in set(cp) | set(cn):
                    c = cp.get(k, 0) * b + cn.get(k, 0) * a
                    if c:
                        co[k] = c
                rest.append((co, kp * b + kn * a, sp or sn))
        rows = rest
    for co, k, strict in rows:
        assert not co
        if (k < 0) or (strict and k == 0):
            return False
    return True


def random_constraints(rng, n, density=0.5, lo=-6, hi=8):
    out = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                v = Fraction(rng.randint(lo, hi), rng.choice([1, 1, 2, 3]))
                out.append((i, j, Bound(v, rng.random() < 0.3)))
    return out


def names(n):
    return ["0"] + [f"x{i}" for i in range(1, n)]


class TestEncoding:
    def test_order_matches_bounds(self):
        vals = [Bound.lt(-1), Bound.le(-1), Bound.lt(0), Bound.le(0), Bound.lt(Fraction(1, 2)), Bound.inf()]
        enc = [encode(b, 2) for b in vals]
        assert enc == sorted(enc)
        assert [decode(e, 2) for e in enc] == vals

    def test_addition(self):
        for a in (Bound.le(2), Bound.lt(2), Bound.inf()):
            for b in (Bound.le(-3), Bound.lt(1)):
                assert decode(add(encode(a, 1), encode(b, 1)), 1) == a + b

    def test_scale_clears_denominators(self):
        assert scale_for([Fraction(1, 2), Fraction(2, 3), None]) == 6
        with pytest.raises(ValueError):
            encode(Bound.le(Fraction(1, 3)), 2)


class TestCanonical:
    def test_three_variable_tightening(self):
        # x - y <= 1, y - z <= 1, x - z <= 5  ->  x - z <= 2
        d = DBM.from_constraints(["0", "x", "y", "z"],
                                 [(1, 2, Bound.le(1)), (2, 3, Bound.le(1)), (1, 3, Bound.le(5))])
        c = canonicalize(d)
        assert c.entry(1, 3) == Bound.le(2)

    def test_incompatible_intervals_are_empty(self):
        # x in [3, inf) together with x in [0, 2]
        d = DBM.from_constraints(["0", "x"], [(0, 1, Bound.le(-3)), (1, 0, Bound.le(2)), (0, 1, Bound.le(0))])
        assert canonicalize(d) is None

    def test_strict_zero_cycle_is_empty(self):
        d = DBM.from_constraints(["0", "x"], [(1, 0, Bound.le(2)), (0, 1, Bound.lt(-2))])
        assert canonicalize(d) is None
        d = DBM.from_constraints(["0", "x"], [(1, 0, Bound.le(2)), (0, 1, Bound.le(-2))])
        assert canonicalize(d) is not None

    def test_idempotent_on_random_matrices(self):
        rng = random.Random(1)
        nonempty = 0
        for _ in range(1000):
            n = rng.randint(1, 6)
            d = DBM.from_constraints(names(n), random_constraints(rng, n))
            c = canonicalize(d)
            if c is None:
                continue
            nonempty += 1
            assert c.is_canonical()
            assert canonicalize(c) == c
            assert (np.diagonal(c.raw) == 1).all()
        assert nonempty > 200

    def test_permutation_commutes(self):
        rng = random.Random(2)
        for _ in range(200):
            n = rng.randint(2, 5)
            d = DBM.from_constraints(names(n), random_constraints(rng, n))
            perm = [0] + rng.sample(range(1, n), n - 1)
            a = canonicalize(d.permuted(perm))
            b = canonicalize(d)
            assert (a is None) == (b is None)
            if a is not None:
                assert a == b.permuted(perm)

    def test_agrees_with_fourier_motzkin(self):
        rng = random.Random(3)
        seen = {True: 0, False: 0}
        for _ in range(1500):
            n = rng.randint(2, 5)  # reference plus up to 4 variables
            cons = random_constraints(rng, n, density=rng.choice([0.3, 0.5, 0.8]))
            d = DBM.from_constraints(names(n), cons)
            want = fm_feasible(n, cons)
            assert (canonicalize(d) is not None) == want, cons
            seen[want] += 1
        assert min(seen.values()) > 100

    def test_closure_bounds_are_tight(self):
        # every finite entry of a closed matrix is attained: tightening it by
        # the smallest step makes the system infeasible in FM terms
        rng = random.Random(4)
        checked = 0
        for _ in range(150):
            n = rng.randint(2, 4)
            cons = random_constraints(rng, n, density=0.6)
            c = canonicalize(DBM.from_constraints(names(n), cons))
            if c is None:
                continue
            for i, j, b in c.constraints():
                flip = Bound(-b.value, not b.strict)  # x_j - x_i beats the bound
                assert not fm_feasible(n, cons + [(j, i, flip)])
                checked += 1
        assert checked > 100

    def test_rescale_equality(self):
        d = DBM.from_constraints(["0", "x"], [(1, 0, Bound.le(Fraction(3, 2)))])
        assert d.rescaled(4) == d
        assert d.rescaled(4).upper(1) == Bound.le(Fraction(3, 2))

    def test_unbounded_stays_infinite(self):
        d = DBM.from_constraints(["0", "x", "y"], [(0, 1, Bound.le(-1))])
        c = canonicalize(d)
        assert c.raw[1, 0] == INF_RAW
        assert c.lower(1) == Bound.le(1)
