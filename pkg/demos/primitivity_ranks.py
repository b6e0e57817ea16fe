"""Primitivity ranks, critical subgroups and the leading correction.

For each word, prints its primitivity rank, the critical subgroup graphs,
and checks that E[xi1] - 1 starts with |Crit| * N^(1 - pi).

Run: python3 demos/primitivity_ranks.py
"""

import warnings

from wordmeasures.errors import ThresholdWarning
from wordmeasures.wordstats import expectation, primitivity
from wordmeasures.words import parse_word

# thresholds are reported on the rational functions themselves
warnings.simplefilter("ignore", ThresholdWarning)

WORDS = ["x", "xxy", "xx", "xxxxxx", "xyXY", "xxyy", "xyxY", "xxyxY"]

for text in WORDS:
    w = parse_word(text, 2)
    rep = primitivity(w)
    pi = "inf" if rep.pi is None else rep.pi
    print(f"{text:8s} pi = {pi:3}  |Crit| = {len(rep.crit)}")
    for g in rep.crit_graphs:
        print(f"           critical graph: {g.num_vertices} vertices, {g.num_edges} edges")
    if rep.pi is not None and len(w) <= 4:
        exp = expectation(w, (1,))
        series = exp.rational.laurent(rep.pi)
        print(f"           E[xi1] = {series}")
