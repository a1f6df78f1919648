"""SPICE realization of the fast/slow oscillator as an analog computer.

The emitted deck follows the classic two-multiplier op-amp realization: one
integrator stage per state variable, a scaling amplifier that forms the
quadratic part of the element response, and a squarer/multiplier cascade
(0.1-scaled two-quadrant multipliers of the AD633 flavor) that closes the
state-dependent feedback loop.

The authoritative part of the deck is the component value card

    C1 = C alpha / s_c          R4 = 0.1 R / (3 b eta^2)
    R1 = 0.1 eps R / s_c        R5 = R / eta
    R2 = eta eps R / s_c        R6 = R / (beta s_c)
    R3 = R / s_c                R7 = R / K
    V  = a_s

built on a base integrator card with R*C = 1 second, valid for the
quadratic element response g(w) = a + 3 b w**2.  The surrounding wiring is
the standard demonstration topology (stage gains close exactly at the
published operating scaling); auxiliary components that any physical build
needs (feedback capacitors, inverters, the bias injection resistor) are
emitted alongside the card and marked as structural in the deck comments.

Decks are plain ASCII with LF line endings, formatted with 17 significant
digits so that parsing a deck back recovers bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

from .circuits import MmoParams

_OPAMP_GAIN = 1e7


@dataclass(frozen=True)
class NetlistSpec:
    """Base integrator card: resistance R and capacitance C with R*C = 1 s."""

    R: float = 1e5
    C: float = 1e-5

    def __post_init__(self):
        if self.R <= 0 or self.C <= 0:
            raise ValueError("base R and C must be positive")
        if abs(self.R * self.C - 1.0) > 1e-12:
            raise ValueError("base card must satisfy R*C = 1 second")


def _quadratic_coefficients(params: MmoParams) -> tuple:
    """(a, b) of g(w) = a + 3 b w**2; rejects any other response shape."""
    coef = params.g.coef
    if len(coef) > 3 or (len(coef) >= 2 and coef[1] != 0.0):
        raise ValueError("netlist realization requires g(w) = a + 3 b w**2")
    a = coef[0]
    b = coef[2] / 3.0 if len(coef) == 3 else 0.0
    return a, b


def estimated_period(params: MmoParams) -> float:
    """Linear-resonance period estimate of the slow subsystem."""
    return 2.0 * pi / (params.s_c * sqrt(params.alpha * params.beta))


def component_values(params: MmoParams, base: NetlistSpec = NetlistSpec()) -> dict:
    """The published component card for a parameter point.

    Raises
    ------
    ValueError
        "multiplier branch undefined" when the quadratic coefficient of the
        element response vanishes (R4 would be infinite);
        "R7 undefined" when K = 0.
    """
    a, b = _quadratic_coefficients(params)
    if 3.0 * b == 0.0:
        raise ValueError("multiplier branch undefined: g(w) has no quadratic term")
    if params.K == 0.0:
        raise ValueError("R7 undefined: K = 0")
    R, C = base.R, base.C
    s = params.s_c
    return {
        "C1": C * params.alpha / s,
        "R1": 0.1 * params.epsilon * R / s,
        "R2": params.eta * params.epsilon * R / s,
        "R3": R / s,
        "R4": 0.1 * R / (3.0 * b * params.eta**2),
        "R5": R / params.eta,
        "R6": R / (params.beta * s),
        "R7": R / params.K,
        "V": params.a_s,
    }


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def emit_netlist(params: MmoParams, base: NetlistSpec = NetlistSpec()) -> str:
    """Render the oscillator deck as a string (ASCII, LF endings).

    The transient card covers five estimated periods of the slow resonance.
    """
    card = component_values(params, base)
    a, _b = _quadratic_coefficients(params)
    R, C = base.R, base.C
    t_est = estimated_period(params)
    step = t_est / 200.0
    stop = 5.0 * t_est
    g = _OPAMP_GAIN
    if a != 0.0:
        r8_line = f"R8 xneg nx {_fmt(R * params.epsilon / (params.s_c * abs(a)))}"
    else:
        r8_line = "* R8 omitted: constant part of g(w) is zero"
    lines = [
        "* memory-element oscillator, two-multiplier analog realization",
        f"* base integrator card: R = {_fmt(R)} ohm, C = {_fmt(C)} F (R*C = 1 s)",
        "* state nodes: xbar (scaled fast), y, z, w; gx closes the element loop",
        "* component card",
        f"C1 ny y {_fmt(card['C1'])}",
        f"R1 gx nx {_fmt(card['R1'])}",
        f"R2 y nx {_fmt(card['R2'])}",
        f"R3 z ny {_fmt(card['R3'])}",
        f"R4 w nsc {_fmt(card['R4'])}",
        f"R5 xneg nw {_fmt(card['R5'])}",
        f"R6 y nz {_fmt(card['R6'])}",
        f"R7 y ny {_fmt(card['R7'])}",
        f"VBIAS bias 0 DC {_fmt(card['V'])}",
        "* structural components (any physical build needs these)",
        f"CX nx xbar {_fmt(C)}",
        f"CZ nz z {_fmt(C)}",
        f"CW nw w {_fmt(C)}",
        r8_line,
        f"R9 xneg ny {_fmt(R / params.eta)}",
        f"R10 bias ny {_fmt(R)}",
        f"RSC nsc wsc {_fmt(0.1 * R)}",
        f"RIA xbar nia {_fmt(R)}",
        f"RIB nia xneg {_fmt(R)}",
        "* op-amp stages (ideal, high-gain VCVS)",
        f"EU1 xbar 0 0 nx {_fmt(g)}",
        f"EU2 y 0 0 ny {_fmt(g)}",
        f"EU3 z 0 0 nz {_fmt(g)}",
        f"EU4 w 0 0 nw {_fmt(g)}",
        f"EU5 xneg 0 0 nia {_fmt(g)}",
        f"EU6 wsc 0 0 nsc {_fmt(g)}",
        "* 0.1-scaled two-quadrant multipliers",
        "BM1 wsq 0 V = 0.1*V(wsc)*V(w)",
        "BM2 gx 0 V = 0.1*V(wsq)*V(xbar)",
        "* transient envelope: five estimated slow periods",
        f".tran {_fmt(step)} {_fmt(stop)}",
        ".end",
    ]
    return "\n".join(lines) + "\n"


def write_netlist(params: MmoParams, path, base: NetlistSpec = NetlistSpec()) -> None:
    deck = emit_netlist(params, base)
    with open(path, "w", newline="\n") as fh:
        fh.write(deck)


def parse_netlist(text: str) -> dict:
    """Structured view of a deck emitted by this module.

    Returns {"title", "components": {name: {"nodes", "value", "expr"}},
    "directives": [...]}.  Component values parse back to bit-identical
    floats thanks to the 17-digit formatting.
    """
    lines = text.split("\n")
    if not lines or not lines[0].startswith("*"):
        raise ValueError("deck must start with a title comment")
    title = lines[0][1:].strip()
    components = {}
    directives = []
    for raw in lines[1:]:
        line = raw.strip()
        if not line or line.startswith("*"):
            continue
        if line.startswith("."):
            directives.append(line)
            continue
        tokens = line.split()
        name = tokens[0]
        kind = name[0].upper()
        if kind in ("R", "C", "L"):
            nodes, value, expr = tokens[1:3], float(tokens[3]), None
        elif kind == "V":
            if tokens[3].upper() != "DC":
                raise ValueError(f"unsupported source card: {line}")
            nodes, value, expr = tokens[1:3], float(tokens[4]), None
        elif kind == "E":
            nodes, value, expr = tokens[1:5], float(tokens[5]), None
        elif kind == "B":
            joined = " ".join(tokens[3:])
            if not joined.startswith("V ="):
                raise ValueError(f"unsupported behavioral card: {line}")
            nodes, value, expr = tokens[1:3], None, joined[3:].strip()
        else:
            raise ValueError(f"unsupported card: {line}")
        components[name] = {"nodes": list(nodes), "value": value, "expr": expr}
    if ".end" not in directives:
        raise ValueError("deck has no .end directive")
    return {"title": title, "components": components, "directives": directives}


def card_from_deck(deck: dict) -> dict:
    """Recover the component value card from a parsed deck."""
    comp = deck["components"]
    out = {name: comp[name]["value"] for name in ("C1", "R1", "R2", "R3", "R4", "R5", "R6", "R7")}
    out["V"] = comp["VBIAS"]["value"]
    return out
