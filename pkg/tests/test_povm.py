import math

import numpy as np
import pytest

from conftest import random_coin
from oracles import full_walk, hwp
from walkpovm.core import Angle, CoinState, Protocol, StepSpec
from walkpovm.errors import DomainError
from walkpovm.povm import (
    PovmElement,
    eigvalsh_2x2,
    identity_element,
    kraus_from_walk,
    kraus_operators,
    povm_element,
    reversed_walk_element,
    closed_form_usd_elements,
    verify_completeness,
)
from walkpovm.usd import UsdParams, compile_usd, discriminate, outcome_map, prepare_coin


def _eq11(phi, sign):
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    v = np.array([sign * s, c])
    return np.outer(v, v) / (2 * c * c)


def random_protocol(rng, max_steps=4):
    n = int(rng.integers(1, max_steps + 1))
    return Protocol(
        tuple(
            StepSpec({x: Angle(float(rng.uniform(0, math.pi / 4))) for x in range(-n, n + 1) if rng.random() < 0.6})
            for _ in range(n)
        )
    )


class TestEigvals:
    def test_against_numpy(self, rng):
        for _ in range(100):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            h = a + a.conj().T
            np.testing.assert_allclose(eigvalsh_2x2(h), np.linalg.eigvalsh(h), atol=1e-12)

    def test_diagonal(self):
        assert eigvalsh_2x2(np.diag([0.3, -0.2])) == (-0.2, 0.3)


class TestKraus:
    def test_inconclusive_kraus(self):
        for phi in (0.3, 1.0, 1.4):
            k = kraus_from_walk(compile_usd(UsdParams.from_phi(phi)).protocol, 3).m
            expected = np.zeros((2, 2))
            expected[0, 0] = math.sqrt(1 - math.tan(phi / 2) ** 2)
            np.testing.assert_allclose(k, expected, atol=1e-12)

    def test_unreachable_is_zero(self):
        k = kraus_from_walk(compile_usd(0.4).protocol, 5)
        assert np.all(k.m == 0)

    def test_single_shift(self):
        k = kraus_from_walk(Protocol((StepSpec(),)), 1)
        np.testing.assert_array_equal(k.m, [[1, 0], [0, 0]])

    def test_against_oracle(self, rng):
        for _ in range(10):
            protocol = random_protocol(rng)
            coins = [{x: hwp(a.theta) for x, a in s.coins.items()} for s in protocol.steps]
            ref_h, ref_v = full_walk(coins, [1, 0]), full_walk(coins, [0, 1])
            for x, k in kraus_operators(protocol).items():
                np.testing.assert_allclose(k.m, np.column_stack([ref_h[x], ref_v[x]]), atol=1e-12)

    def test_completeness_random_protocols(self, rng):
        for _ in range(50):
            ks = kraus_operators(random_protocol(rng)).values()
            total = sum(k.m.conj().T @ k.m for k in ks)
            assert np.max(np.abs(total - np.eye(2))) <= 1e-10


class TestElements:
    def test_e_plus_closed_form(self, rng):
        for phi in rng.uniform(0.05, math.pi / 2, 10):
            usd = compile_usd(UsdParams.from_phi(phi))
            np.testing.assert_allclose(povm_element(kraus_from_walk(usd.protocol, 1)).e, _eq11(phi, 1), atol=1e-12)
            np.testing.assert_allclose(povm_element(kraus_from_walk(usd.protocol, -1)).e, _eq11(phi, -1), atol=1e-12)

    def test_inconclusive_element(self):
        phi = 0.8
        e = povm_element(kraus_from_walk(compile_usd(UsdParams.from_phi(phi)).protocol, 3)).e
        np.testing.assert_allclose(e, np.diag([1 - math.tan(phi / 2) ** 2, 0]), atol=1e-12)

    def test_zero_kraus(self):
        assert np.all(povm_element(kraus_from_walk(compile_usd(0.1).protocol, 5)).e == 0)

    def test_validity(self, rng):
        for _ in range(20):
            for k in kraus_operators(random_protocol(rng)).values():
                el = povm_element(k)
                assert el.is_valid()

    def test_born_rule_consistency(self, rng):
        p = UsdParams.from_alpha(0.42)
        usd = compile_usd(p)
        elements = {i: povm_element(kraus_from_walk(usd.protocol, i)) for i in (1, -1, 3)}
        for _ in range(20):
            c = random_coin(rng)
            sim = outcome_map(discriminate(usd, c))
            for i, el in elements.items():
                assert abs(el.probability(c) - sim[i]) < 1e-10

    def test_success_rate_identity(self):
        for alpha in np.linspace(0, 0.99, 50):
            p = UsdParams.from_alpha(alpha)
            els = closed_form_usd_elements(p)
            assert abs(els["E_plus"].probability(prepare_coin(p, "+")) - (1 - alpha)) < 1e-10
            assert abs(els["E_minus"].probability(prepare_coin(p, "-")) - (1 - alpha)) < 1e-10

    def test_zero_error(self):
        for phi in np.linspace(1e-3, math.pi / 2, 60):
            p = UsdParams.from_phi(phi)
            usd = compile_usd(p)
            ep = povm_element(kraus_from_walk(usd.protocol, 1)).e
            em = povm_element(kraus_from_walk(usd.protocol, -1)).e
            assert np.linalg.norm(ep @ prepare_coin(p, "-").as_array()) <= 1e-12
            assert np.linalg.norm(em @ prepare_coin(p, "+").as_array()) <= 1e-12


class TestReversedWalk:
    @pytest.mark.parametrize("phi", [0.3, math.radians(45), 1.2])
    def test_output_coin_gives_eq11(self, phi):
        usd = compile_usd(UsdParams.from_phi(phi))
        np.testing.assert_allclose(reversed_walk_element(usd.protocol, 1, CoinState.H()).e, _eq11(phi, 1), atol=1e-12)
        np.testing.assert_allclose(reversed_walk_element(usd.protocol, -1, CoinState.V()).e, _eq11(phi, -1), atol=1e-12)

    def test_restriction_identity(self, rng):
        # |t><t| = K^dag |c><c| K for any coin c at any outcome
        for _ in range(20):
            protocol = random_protocol(rng)
            c = random_coin(rng)
            for i, k in kraus_operators(protocol).items():
                lit = reversed_walk_element(protocol, i, c).e
                v = c.as_array()
                np.testing.assert_allclose(lit, k.m.conj().T @ np.outer(v, v.conj()) @ k.m, atol=1e-12)

    def test_input_state_scales_by_overlap(self):
        phi = 1.0
        p = UsdParams.from_phi(phi)
        lit = reversed_walk_element(compile_usd(p).protocol, 1, prepare_coin(p, "+")).e
        np.testing.assert_allclose(lit, math.cos(phi / 2) ** 2 * _eq11(phi, 1), atol=1e-12)

    def test_projective_limit(self):
        p = UsdParams.from_alpha(0.0)
        e = reversed_walk_element(compile_usd(p).protocol, 1, CoinState.H()).e
        v = prepare_coin(p, "+").as_array()
        np.testing.assert_allclose(e, np.outer(v, v), atol=1e-12)


class TestClosedForm:
    def test_projective_limit(self):
        p = UsdParams.from_alpha(0.0)
        els = closed_form_usd_elements(p)
        for key, sign in (("E_plus", "+"), ("E_minus", "-")):
            v = prepare_coin(p, sign).as_array()
            np.testing.assert_allclose(els[key].e, np.outer(v, v), atol=1e-12)
        assert np.all(els["E_inconclusive"].e == 0)

    def test_inconclusive_at_45(self):
        e = closed_form_usd_elements(UsdParams.from_phi(math.radians(45)))["E_inconclusive"].e
        assert abs(e[0, 0] - (1 - math.tan(math.radians(22.5)) ** 2)) < 1e-12
        assert abs(e[0, 0] - 0.8284) < 1e-4

    def test_success_at_54(self):
        p = UsdParams.from_phi(math.radians(54))
        val = closed_form_usd_elements(p)["E_plus"].probability(prepare_coin(p, "+"))
        assert abs(val - (1 - math.cos(math.radians(54)))) < 1e-12 and abs(val - 0.412) < 1e-3

    def test_matches_walk(self):
        for phi in np.linspace(0.1, math.pi / 2, 12):
            p = UsdParams.from_phi(phi)
            usd = compile_usd(p)
            closed = closed_form_usd_elements(p)
            for key, i in (("E_plus", 1), ("E_minus", -1), ("E_inconclusive", 3)):
                np.testing.assert_allclose(povm_element(kraus_from_walk(usd.protocol, i)).e, closed[key].e, atol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            closed_form_usd_elements(1.0)


class TestCompleteness:
    def test_usd_passes(self):
        for alpha in np.linspace(0, 0.99, 50):
            rep = verify_completeness(closed_form_usd_elements(UsdParams.from_alpha(alpha)).values())
            assert rep.passed and rep.deviation <= 1e-10

    def test_identity_alone(self):
        assert verify_completeness([identity_element()]).passed

    def test_missing_inconclusive(self):
        phi = 0.9
        els = closed_form_usd_elements(UsdParams.from_phi(phi))
        rep = verify_completeness([els["E_plus"], els["E_minus"]])
        assert not rep.passed
        assert abs(rep.deviation - (1 - math.tan(phi / 2) ** 2)) < 1e-12

    def test_negative_element_fails(self):
        rep = verify_completeness([PovmElement(np.diag([1.1, 0.5]), 0), PovmElement(np.diag([-0.1, 0.5]), 1)])
        assert rep.deviation < 1e-12 and not rep.passed
