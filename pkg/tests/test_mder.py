import random
from itertools import combinations

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from homdef.hlr import lie_algebra
from homdef.mder import (
    CarrierMismatch,
    MaurerCartanError,
    Multiderivation,
    bracket,
    check_multiderivation,
    circ,
    from_structure,
    maurer_cartan_witness,
    mder_space,
    symbol_curly,
    symbol_odot,
    to_structure,
)
from homdef.tensors import contract, is_zero, unit

from oracles import nr_circ
from structures import (
    abelian_n,
    der_phi_x3,
    dual_action,
    dual_regular,
    heisenberg,
    sl2,
    twisted_sl2,
)

MODULES = {
    "sl2": lambda: sl2().module,
    "tsl2": lambda: twisted_sl2().module,
    "dual": dual_regular,
    "dual-tw": lambda: dual_action(True).module,
    "derphi": lambda: der_phi_x3().module,
}
_cache = {}


def module(name):
    if name not in _cache:
        _cache[name] = MODULES[name]()
    return _cache[name]


def alpha_compatible_dim(alpha, n, arity):
    """dim of alternating maps f: wedge^arity Q^n -> Q^n with f(alpha..) = alpha f(..), by sympy."""
    tuples = list(combinations(range(n), arity))
    syms = sp.symbols(f"u0:{len(tuples) * n}")
    val = {t: sp.Matrix(syms[i * n:(i + 1) * n]) for i, t in enumerate(tuples)}
    a = sp.Matrix([[sp.Rational(x) for x in r] for r in alpha])

    def f(idx_vecs):
        # multilinear evaluation on vectors via the increasing-tuple values
        out = sp.zeros(n, 1)
        def rec(pos, chosen, coef):
            if coef == 0:
                return
            if pos == arity:
                if len(set(chosen)) < arity:
                    return
                srt = tuple(sorted(chosen))
                sign = 1
                for i in range(arity):
                    for j in range(i + 1, arity):
                        if chosen[i] > chosen[j]:
                            sign = -sign
                out_add[0] += coef * sign * val[srt]
                return
            for i in range(n):
                rec(pos + 1, chosen + (i,), coef * idx_vecs[pos][i])
        out_add = [out]
        rec(0, (), 1)
        return out_add[0]

    eqs = []
    for t in tuples:
        lhs = f([a[:, i] for i in t])
        eqs.extend(list(lhs - a * val[t]))
    if not eqs:
        return len(syms)
    M, _ = sp.linear_eq_to_matrix(eqs, syms)
    return len(syms) - M.rank()


@pytest.mark.parametrize("name,degree,expected", [
    ("sl2", 0, 9), ("sl2", 1, 9), ("sl2", 2, 3), ("sl2", 3, 0), ("dual", 0, 3),
])
def test_documented_dimensions(name, degree, expected):
    assert mder_space(module(name), degree).dim == expected


@pytest.mark.parametrize("name", ["sl2", "tsl2"])
@pytest.mark.parametrize("degree", [0, 1, 2])
def test_ground_field_dims_are_alpha_compatible_cochains(name, degree):
    M = module(name)
    assert mder_space(M, degree).dim == alpha_compatible_dim(M.beta, M.dim, degree + 1)


def test_dual_numbers_degree_zero_bruteforce():
    # unknowns: D (2x2, columns = images) and sigma (2x2); A = Q[x]/(x^2), M = A
    d = sp.Matrix(2, 2, sp.symbols("d0:4"))
    s = sp.Matrix(2, 2, sp.symbols("s0:4"))
    mul = lambda u, v: sp.Matrix([u[0] * v[0], u[0] * v[1] + u[1] * v[0]])
    E = [sp.Matrix([1, 0]), sp.Matrix([0, 1])]
    eqs = []
    for a in E:
        for b in E:
            eqs += list(s * mul(a, b) - mul(a, s * b) - mul(b, s * a))   # sigma a derivation
            eqs += list(d * mul(a, b) - mul(a, d * b) - mul(s * a, b))   # Leibniz
    M, _ = sp.linear_eq_to_matrix(eqs, list(d) + list(s))
    assert mder_space(module("dual"), 0).dim == 8 - M.rank() == 3


@pytest.mark.parametrize("name", list(MODULES))
@pytest.mark.parametrize("degree", [0, 1, 2])
def test_basis_elements_are_multiderivations(name, degree):
    for e in mder_space(module(name), degree).elements:
        assert check_multiderivation(e).ok


def _as_func(md):
    return lambda idx: sp.Matrix([sp.Rational(x) for x in contract(md.d, [unit(md.module.dim, i) for i in idx])])


@pytest.mark.parametrize("p,q", [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (0, 2)])
def test_circ_matches_permutation_average(p, q):
    M = module("sl2")
    rng = random.Random(p * 10 + q)
    D1 = mder_space(M, p).element([rng.randint(-3, 3) for _ in range(mder_space(M, p).dim)])
    D2 = mder_space(M, q).element([rng.randint(-3, 3) for _ in range(mder_space(M, q).dim)])
    t = circ(D1, D2)
    ref = nr_circ(_as_func(D1), _as_func(D2), M.dim, p, q)
    for idx, v in ref.items():
        assert [sp.Rational(x) for x in t[idx]] == list(v)


def test_degree_zero_bracket_is_commutator():
    M = module("dual")
    S = mder_space(M, 0)
    a, b = S.elements[0] + S.elements[1], S.elements[2].scale(3)
    c = bracket(a, b)
    ma, mb = a.d.T, b.d.T
    assert (c.d.T == ma.dot(mb) - mb.dot(ma)).all()
    assert (c.sigma == a.sigma.dot(b.sigma) - b.sigma.dot(a.sigma)).all()
    assert (symbol_curly(a, b) == c.sigma).all()
    assert is_zero(symbol_odot(a, b))


def test_odot_single_term_for_p1_q0():
    M = module("derphi")
    D1 = mder_space(M, 1).elements[0]
    D2 = mder_space(M, 0).elements[0]
    t = symbol_odot(D1, D2)
    for i in range(M.dim):
        expect = contract(D1.sigma, [D2.d[i]])
        assert (t[i] == expect).all()


def test_curly_degree_one_over_der_phi():
    # {s1, s2}(x1, x2) = s1(beta x1) s2(x2) - s2(beta x2) s1(x1) summed over Sh(1,1)
    M = module("derphi")
    D1, D2 = mder_space(M, 1).elements[:2] if mder_space(M, 1).dim > 1 else (mder_space(M, 1).elements[0],) * 2
    t = symbol_curly(D1, D2)
    b = M.beta
    x, y = unit(2, 0), unit(2, 1)

    def term(u, v):
        return (contract(D1.sigma, [b.dot(u)]).dot(contract(D2.sigma, [v]))
                - contract(D2.sigma, [b.dot(v)]).dot(contract(D1.sigma, [u])))

    assert (t[0, 1] == term(x, y) - term(y, x)).all()


def test_mismatched_carriers_raise():
    with pytest.raises(CarrierMismatch):
        bracket(Multiderivation.zero(module("sl2"), 0), Multiderivation.zero(sl2().module, 0))


@pytest.mark.parametrize("build", [sl2, twisted_sl2, heisenberg, der_phi_x3, dual_action, lambda: dual_action(True)])
def test_maurer_cartan_roundtrip(build):
    s = build()
    m = from_structure(s)
    assert bracket(m, m).is_zero()
    t = to_structure(m)
    assert (t.bracket == s.bracket).all() and (t.anchor == s.anchor).all() and t.module is s.module


def test_square_of_bracket_is_twice_jacobiator():
    s = lie_algebra({("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"e": 1}}, ["h", "e", "f"])
    m = from_structure(s, check=False)
    mm = bracket(m, m)
    E = [unit(3, i) for i in range(3)]
    x, y, z = E
    jac = (s.br(s.alpha.dot(x), s.br(y, z)) + s.br(s.alpha.dot(y), s.br(z, x))
           + s.br(s.alpha.dot(z), s.br(x, y)))
    assert (mm.d[0, 1, 2] == 2 * jac).all()
    with pytest.raises(MaurerCartanError):
        to_structure(m)
    assert maurer_cartan_witness(m)[0][0] == "value"


def test_abelian_zero_element():
    s = abelian_n(2)
    t = to_structure(Multiderivation.zero(s.module, 1))
    assert is_zero(t.bracket) and is_zero(t.anchor)


def test_projection_injectivity_flag():
    assert mder_space(module("sl2"), 1).projection_injective()
    assert mder_space(module("derphi"), 0).projection_injective() in (True, False)


def _rand(M, degree, draw):
    S = mder_space(M, degree)
    return S.element([draw(st.integers(-2, 2)) for _ in range(S.dim)])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(MODULES)), st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_antisymmetry(name, p, q, data):
    M = module(name)
    a, b = _rand(M, p, data.draw), _rand(M, q, data.draw)
    assert bracket(a, b).equals(bracket(b, a).scale(-(-1) ** (p * q)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(list(MODULES)), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1), st.data())
def test_graded_jacobi(name, p, q, r, data):
    M = module(name)
    a, b, c = _rand(M, p, data.draw), _rand(M, q, data.draw), _rand(M, r, data.draw)
    tot = (bracket(bracket(a, b), c).scale((-1) ** (p * r))
           + bracket(bracket(b, c), a).scale((-1) ** (q * p))
           + bracket(bracket(c, a), b).scale((-1) ** (r * q)))
    assert tot.is_zero()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(list(MODULES)), st.integers(0, 1), st.integers(0, 1), st.data())
def test_bracket_closes(name, p, q, data):
    M = module(name)
    c = bracket(_rand(M, p, data.draw), _rand(M, q, data.draw))
    assert check_multiderivation(c).ok
    assert mder_space(M, p + q).contains(c)
