import numpy as np
import pytest
from numpy.testing import assert_allclose

from memodyn.circuits import MmoParams, default_mmo_params
from memodyn.memelement import Polynomial, quadratic_g
from memodyn.netlist import (
    NetlistSpec,
    card_from_deck,
    component_values,
    emit_netlist,
    estimated_period,
    parse_netlist,
    write_netlist,
)


def _params(eps=0.01, alpha=1.0, K=1.0, beta=1.0, eta=10.0, s=1.0, a_s=0.01,
            a=-0.1, b=0.1):
    return MmoParams(epsilon=eps, alpha=alpha, K=K, beta=beta, eta=eta,
                     s_c=s, a_s=a_s, g=quadratic_g(a, b))


def test_card_formulas_random_draws():
    rng = np.random.default_rng(4242)
    base = NetlistSpec()
    R, C = base.R, base.C
    for _ in range(50):
        eps = float(rng.uniform(0.005, 0.5))
        alpha = float(rng.uniform(0.3, 3.0))
        K = float(rng.uniform(0.2, 2.0))
        beta = float(rng.uniform(0.3, 3.0))
        eta = float(rng.uniform(1.0, 20.0))
        s = float(rng.uniform(0.2, 4.0))
        a_s = float(rng.normal(0.0, 0.1))
        a = float(rng.normal(0.0, 0.3))
        b = float(rng.uniform(0.01, 0.5))
        p = _params(eps, alpha, K, beta, eta, s, a_s, a, b)
        card = component_values(p)
        assert_allclose(card["C1"], C * alpha / s, rtol=1e-15)
        assert_allclose(card["R1"], 0.1 * eps * R / s, rtol=1e-15)
        assert_allclose(card["R2"], eta * eps * R / s, rtol=1e-15)
        assert_allclose(card["R3"], R / s, rtol=1e-15)
        assert_allclose(card["R4"], 0.1 * R / (3 * b * eta**2), rtol=1e-15)
        assert_allclose(card["R5"], R / eta, rtol=1e-15)
        assert_allclose(card["R6"], R / (beta * s), rtol=1e-15)
        assert_allclose(card["R7"], R / K, rtol=1e-15)
        assert card["V"] == a_s


def test_base_card_validation():
    spec = NetlistSpec(R=2e4, C=5e-5)
    assert spec.R * spec.C == 1.0
    with pytest.raises(ValueError, match="R\\*C = 1 second"):
        NetlistSpec(R=1e5, C=1e-4)
    with pytest.raises(ValueError, match="must be positive"):
        NetlistSpec(R=-1.0, C=-1.0)


def test_custom_base_scales_card():
    p = _params()
    small = component_values(p, NetlistSpec(R=1e4, C=1e-4))
    big = component_values(p, NetlistSpec(R=1e5, C=1e-5))
    for name in ("R1", "R2", "R3", "R4", "R5", "R6", "R7"):
        assert_allclose(small[name], big[name] / 10.0, rtol=1e-15)
    assert_allclose(small["C1"], big["C1"] * 10.0, rtol=1e-15)


def test_undefined_branches():
    with pytest.raises(ValueError, match="multiplier branch undefined"):
        component_values(_params(b=0.0))
    with pytest.raises(ValueError, match="R7 undefined"):
        component_values(_params(K=0.0))
    p_cubic = MmoParams(epsilon=0.01, alpha=1.0, K=1.0, beta=1.0, eta=10.0,
                        s_c=1.0, a_s=0.0, g=Polynomial((0.1, 0.2, 0.3)))
    with pytest.raises(ValueError, match="g\\(w\\) = a \\+ 3 b w\\*\\*2"):
        component_values(p_cubic)


def test_eta_dependency_set():
    # changing only eta must change exactly the cards that carry eta:
    # R2, R4 and R5 (plus the structural R9 divider)
    p1, p2 = _params(eta=10.0), _params(eta=5.0)
    c1, c2 = component_values(p1), component_values(p2)
    changed = {k for k in c1 if c1[k] != c2[k]}
    assert changed == {"R2", "R4", "R5"}


def test_deck_round_trip_bit_exact():
    p = _params(eps=0.0173, alpha=1.31, K=0.77, beta=1.9, eta=7.3,
                s=2.1, a_s=-0.042, a=-0.23, b=0.17)
    deck_text = emit_netlist(p)
    parsed = parse_netlist(deck_text)
    recovered = card_from_deck(parsed)
    card = component_values(p)
    for name, value in card.items():
        assert recovered[name] == value, name  # bit-exact through the text


def test_deck_structure():
    p = default_mmo_params()
    text = emit_netlist(p)
    assert text == text.encode("ascii").decode("ascii")
    assert "\r" not in text
    assert text.endswith(".end\n")
    parsed = parse_netlist(text)
    comp = parsed["components"]
    # six op-amp stages as high-gain VCVS elements
    stages = [n for n in comp if n.startswith("EU")]
    assert len(stages) == 6
    for n in stages:
        assert comp[n]["value"] == 1e7
        assert len(comp[n]["nodes"]) == 4
    # two 0.1-scaled multiplier cards with behavioral expressions
    assert comp["BM1"]["expr"] == "0.1*V(wsc)*V(w)"
    assert comp["BM2"]["expr"] == "0.1*V(wsq)*V(xbar)"
    # integration capacitors on every state node
    for n in ("CX", "CZ", "CW", "C1"):
        assert n in comp
    # transient envelope: five estimated periods at 1/200 resolution
    t_est = estimated_period(p)
    tran = [d for d in parsed["directives"] if d.startswith(".tran")][0]
    _, step, stop = tran.split()
    assert_allclose(float(step), t_est / 200.0, rtol=1e-15)
    assert_allclose(float(stop), 5.0 * t_est, rtol=1e-15)


def test_estimated_period_formula():
    p = _params(alpha=4.0, beta=0.25, s=2.0)
    assert_allclose(estimated_period(p), 2.0 * np.pi / 2.0, rtol=1e-15)


def test_r8_presence_tracks_constant_term():
    text = emit_netlist(_params(a=-0.1))
    assert "R8 xneg nx" in text
    text0 = emit_netlist(_params(a=0.0))
    assert "R8 omitted" in text0
    assert "R8 xneg nx" not in text0


def test_emit_deterministic():
    p = _params()
    assert emit_netlist(p) == emit_netlist(p)


def test_write_netlist_file(tmp_path):
    p = default_mmo_params()
    path = tmp_path / "osc.cir"
    write_netlist(p, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("ascii") == emit_netlist(p)


def test_parser_rejects_malformed_decks():
    with pytest.raises(ValueError, match="title comment"):
        parse_netlist("R1 a b 10\n.end\n")
    with pytest.raises(ValueError, match="no .end directive"):
        parse_netlist("* title\nR1 a b 10\n")
    with pytest.raises(ValueError, match="unsupported card"):
        parse_netlist("* title\nQ1 a b c model\n.end\n")
    with pytest.raises(ValueError, match="unsupported source card"):
        parse_netlist("* title\nV1 a 0 AC 1\n.end\n")
    with pytest.raises(ValueError, match="unsupported behavioral card"):
        parse_netlist("* title\nB1 a 0 I = V(a)\n.end\n")
