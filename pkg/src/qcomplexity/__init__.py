"""Classical and quantum statistical complexity of measurement sequences
drawn from 1-D quantum lattice ground states."""

__version__ = "0.1.0"
