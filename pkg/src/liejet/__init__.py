"""Covariant field theory on Lie groups: SE(3) algebra, numerical forms,
first jets, Lagrangian/Hamiltonian residuals and a Reissner beam solver."""

__version__ = "0.1.0"
