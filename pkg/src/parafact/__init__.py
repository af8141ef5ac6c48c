"""parafact: weakly supervised acquisition of paraphrastic extraction patterns.

From one seed pattern and a corpus, acquire semantically close head/expansion
patterns through a weighted semantic net, let an analyst validate them,
compile syntactic-variation templates into a token automaton, extract slot
fillers, and score slot-level precision/recall.
"""

__version__ = "0.1.0"
