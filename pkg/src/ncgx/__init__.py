"""Finite-scale spectral triples on crossed products by discrete groups.

Submodules: ``opalg`` (operators), ``groups`` (groups and weights), ``triples``
(spectral triples, real structures, order conditions), ``crossed`` (the
crossed-product triple), ``realcx`` (its real structures), ``hochschild``
(chains and orientation cycles) and ``harness`` (fixtures and the CLI).
"""
__version__ = "0.1.0"
