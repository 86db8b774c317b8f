# Concrete system: three states, two actions.
states x0 x1 x2
actions a b
props Initial Goal
x0 a x0
x0 b x2
x1 a x2
x1 b x1
x2 a x2
x0 : Initial
x1 : Initial
x2 : Goal
