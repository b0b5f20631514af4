"""Classical and quantum dynamics on the Bernoulli information manifold."""

__version__ = "0.1.0"
