"""Coherence certificates for finitely presented groups.

Missing-weight bookkeeping on combinatorial 2-complexes, bipartite
matchings with multiplicities, small-cancellation analysis, and a
constructive presentation loop for finitely generated subgroups.
"""

__version__ = "0.1.0"
