"""Toolkit for open annotations on multimedia Web resources.

Submodules:
  rdf         minimal triple model, N-Triples/Turtle serialization, isomorphism
  model       annotation domain types and the graph mapping
  fragments   fragment URI grammars and segment evaluation
  constraints SVG and inline segment constraints
  temporal    temporal classes and archive snapshot resolution
  validation  coded conformance findings over graphs
  server      HTTP publishing, search, and a timegate
  cli         command-line interface
"""

__version__ = "0.1.0"
