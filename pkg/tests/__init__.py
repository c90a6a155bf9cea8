"""
Tests for nodal-abel

Test suite covering:
- Curve model, separating structure and combinatorial sheaves
- Canonical and Seshadri stability with the report cache
- Abel maps, fibers, image curves and S-equivalence
- Curve file parsing, DOT export and the command-line front end
"""
