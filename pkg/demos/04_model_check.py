# Exhaustive search for attacks, with each defense switched off in turn.
from cechain.protofsm import ALL_DEFENSES, Defense, check_action_sets, model_check

v = model_check()
print(f"all defenses: safe={v.safe}, {v.states_explored} states")
print("single and paired adversaries safe:", all(x.safe for x in check_action_sets().values()))

for d in Defense:
    v = model_check(defenses=ALL_DEFENSES - {d})
    adv = [s for s in v.counterexample if s.actor == "adversary"]
    print(f"\nwithout {d.value}: {len(v.counterexample)}-step attack")
    for s in adv:
        print(f"  adversary {s.action} at frame {s.state['k']}")
    last = v.counterexample[-1]
    print(f"  ends in {last.state['sta']} with tainted={last.state['tainted']} "
          f"genuine={last.state['genuine']} sta_ch={last.state['sta_ch']} ap_ch={last.state['ap_ch']}")
