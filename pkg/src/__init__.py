"""QB-Norm Retrieval

Querybank normalisation for cross-modal retrieval: probe a gallery with a
bank of held-out queries and re-score new queries with GC, CSLS, IS or DIS
to reduce hubness.
"""

__version__ = "1.0.0"
