"""Vector partition functions and Ehrhart quasi-polynomials."""
