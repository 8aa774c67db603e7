"""Exact certificates that induced-subgraph densities can beat the random graph.

Modules: ``exactnum`` (rationals, polynomials, Q(sqrt a, sqrt b)), ``graphs``
(small-graph classes, graph6), ``stepkernel`` (exact step kernels),
``expansion`` (perturbation coefficients), ``ffkernel`` (finite-field kernels),
``certifier`` (certificates and validation), ``sampler`` (Monte Carlo) and
``cli``.
"""

__version__ = "0.1.0"
