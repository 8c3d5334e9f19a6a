"""K-theory computations over finite block algebras and circle-grid
matrix algebras: absolute values, order-unit norms, element predicates,
certified equivalence relations, and the ordered groups K0, K1, K."""

__version__ = "0.1.0"
