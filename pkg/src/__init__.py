"""
nodal-abel - Abel maps, twisters and stability on dual graphs of nodal curves

Modules:
- curve: genus-weighted dual graphs, subcurves and points
- structure: separating nodes, tails, small tails, spines and lines
- sheaf: combinatorial torsion-free rank-1 sheaves
- stability: canonical and Seshadri stability
- abel: degree-0 and degree-1 Abel maps, fibers and the image curve
- sequiv: Jordan-Hölder filtrations and S-equivalence
- cli: command-line front end
"""
__version__ = "0.1.0"
