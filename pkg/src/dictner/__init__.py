"""dictner: named-entity taggers learned from a typed dictionary and raw
text only.

The pipeline generates distant labels by exact dictionary matching with
coverage-maximizing conflict resolution, refines the dictionary
(corpus-aware tailoring, unknown-typed quality phrases), and trains either
a lattice-constrained CRF tagger or a gap/span model that classifies
Tie-or-Break boundaries and types the resulting spans.
"""

__version__ = "0.1.0"
