"""padhg: exact p-adic special functions, Dirichlet L-values, and explicit
Frobenius matrices on hypergeometric differential equations, with machine
verification of the residue formulas via truncated power series."""

__version__ = "0.1.0"
