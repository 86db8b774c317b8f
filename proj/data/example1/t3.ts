# Reconstructed: every abstract successor set is {q0, q1}.
states q0 q1
actions 1 2 3
props Initial Goal
q0 1 q0
q0 1 q1
q0 2 q0
q0 2 q1
q1 3 q0
q1 3 q1
q0 : Initial
q1 : Goal
