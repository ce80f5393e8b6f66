"""Quick end-to-end check of the Python bindings.

Build first with `pip install --no-build-isolation -e crates/python`.
"""

import json

import translucent

pd = translucent.Game.pd()
assert pd.num_players == 2
assert pd.strategy_names == [["C", "S"], ["C", "S"]]
assert pd.utility([0, 0], 0) == "0"
assert pd.utility([1, 0], 0) == "1"

# Both strategies survive minimax deletion in the prisoner's dilemma.
assert pd.survivors() == [[0, 1], [0, 1]]
assert pd.nsd()["rounds"] == []

rt = translucent.Game.reverse_traveler(10)
assert rt.survivors() == [[9], [9]]
assert rt.oracle()["survivors"] == [[9], [9]]

for kind in ("ccbr", "kw", "ir"):
    m, w = pd.witness([0, 0], kind=kind)
    assert m.validate(strong=True)["ok"], kind
    assert m.holds(w, "play(C,C)"), kind
    if kind != "ir":
        assert m.ccbr(w)[0], kind

m, w = pd.witness([0, 0], kind="ir")
assert m.holds(w, "KW & CB RAT")
assert m.epsilon() == "1"
again = translucent.Structure.from_json(m.to_json())
assert again.num_states == m.num_states

lifted, state_map = m.lift()
assert lifted.respects_unilateral_deviations()
assert lifted.epsilon() == "0"
assert len(state_map) == m.num_states

ex2 = translucent.Game.ex2()
assert len(ex2.ir()) == 3
assert [1, 1] not in ex2.ir()
try:
    ex2.witness([1, 1], kind="ir")
except ValueError as e:
    assert "precondition" in str(e).lower()
else:
    raise AssertionError("ex2 (b,d) should have no IR witness")

assert json.loads(pd.to_json())["players"]
print("python smoke test ok")
