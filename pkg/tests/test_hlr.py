from fractions import Fraction

import pytest

from homdef.hlr import (
    MorphismError,
    adjoint_representation,
    canonical_module,
    der_phi_basis_matrices,
    fibered_product,
    lie_algebra,
    twist_by_morphism,
    validate_hlr,
    validate_hlr_module,
)
from homdef.tensors import eye, is_zero, qarray, unit

from structures import (
    TWIST,
    abelian_n,
    der_phi_x3,
    dual_action,
    heisenberg,
    sl2,
    twisted_sl2,
)


@pytest.mark.parametrize("build", [sl2, twisted_sl2, heisenberg, lambda: abelian_n(3),
                                   der_phi_x3, dual_action, lambda: dual_action(True)])
def test_valid_structures_pass(build):
    assert validate_hlr(build()).ok


def test_broken_jacobi_witness():
    s = lie_algebra({("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"e": 1}}, ["h", "e", "f"])
    rep = validate_hlr(s)
    assert rep.identities() == ["(ii) hom-Jacobi"]
    assert set(rep.violations[0].witness) == {"e", "f", "h"}


def test_twisting_sl2_by_automorphism():
    s = sl2()
    t = twist_by_morphism(s, eye(1), TWIST)
    assert validate_hlr(t).ok
    assert t.same_as(twisted_sl2())
    # identity twist changes nothing
    assert twist_by_morphism(s, eye(1), eye(3)).same_as(s)


def test_twist_rejects_non_morphism():
    bad = qarray([[Fraction(1), 0, 0], [0, Fraction(2), 0], [0, 0, Fraction(1)]])
    with pytest.raises(MorphismError) as exc:
        twist_by_morphism(sl2(), eye(1), bad)
    assert "alpha'[x,y] = [alpha'x, alpha'y]" in exc.value.report.identities()


def test_twisted_action_algebroid():
    t = dual_action(True)
    assert t.alpha[1, 1] == 2 and t.phi[1, 1] == 2
    assert validate_hlr(t).ok


def test_der_phi_structure():
    s = der_phi_x3()
    assert s.dim == 2
    A = s.algebra
    pinv = A.phi_inverse()
    mats = der_phi_basis_matrices(s)
    for i in range(s.dim):
        # the anchor is Ad_phi of the derivation an element stands for
        assert (s.anchor[i] == A.phi.dot(mats[i]).dot(pinv)).all()


def test_fibered_product_zero_anchor_is_direct_sum():
    p = fibered_product(sl2(), heisenberg())
    assert p.dim == 6 and validate_hlr(p).ok
    # componentwise: the first three kernel vectors are sl2
    assert (p.bracket[:3, :3, :3] == sl2().bracket).all()
    assert is_zero(p.bracket[:3, 3:])


def test_fibered_product_injective_anchor_is_diagonal():
    s = der_phi_x3()
    p = fibered_product(s, s)
    assert p.dim == s.dim
    assert validate_hlr(p).ok


def test_fibered_product_needs_same_algebra():
    with pytest.raises(ValueError):
        fibered_product(sl2(), der_phi_x3())


def test_canonical_module():
    s = der_phi_x3()
    mod = canonical_module(s)
    assert validate_hlr_module(mod).ok
    for i in range(s.dim):
        assert (mod.theta(unit(s.dim, i)) == s.anchor[i]).all()
    triv = canonical_module(sl2())
    assert triv.carrier.dim == 1 and is_zero(triv.action)


@pytest.mark.parametrize("power", [0, 1, 2, -1])
def test_adjoint_representations(power):
    s = twisted_sl2()
    mod = adjoint_representation(s, power)
    assert validate_hlr_module(mod).ok


def test_adjoint_zero_power_is_ad():
    s = sl2()
    mod = adjoint_representation(s, 0)
    for g in range(3):
        for h in range(3):
            assert (mod.action[g, h] == s.bracket[g, h]).all()
    assert is_zero(adjoint_representation(abelian_n(2), 3).action)
