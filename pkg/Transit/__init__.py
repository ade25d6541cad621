"""
Transit - Transitions Between Separable Clusterings

Given two separable clusterings of the same point set, computes a
step-by-step transition in which every intermediate clustering is a
constrained least-squares assignment (and therefore admits a power
diagram), consecutive clusterings differ by one cyclical or sequential
exchange of items, and cluster sizes stay between the endpoint sizes.

Architecture:
1. Config - tolerances, pivot rule, budgets (pydantic + dotenv)
2. Core - points, clusterings, shapes, sites, objectives
3. CDG - clustering difference graphs and exchanges
4. Transport_LP - revised simplex over the bounded-shape transportation polytope
5. Power_Diagram - margin-maximizing and shared power diagrams
6. Fixed_Site_Transition - LSA -> radial clustering for fixed sites
7. Parametric_Transition - radial -> radial edge walk along (1-λ)s + λt
8. Pipeline - the overall transition and its verification report
9. Oracle - brute-force ground truth for small instances
10. IO_Layer - instance/transition files and SVG rendering
"""

__version__ = "1.0.0"
