"""
histclaims

Exact-arithmetic engine for claims problems with history: the classical
division rules, the historical operator that extends them to problems with
a record of past claims and allocations, an axiom catalog with a seeded
counterexample search, and exact paths of awards.
"""

__version__ = "0.1.0"
