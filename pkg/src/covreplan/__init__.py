"""Coverage path planning on grids with anytime budget-constrained replanning."""

__version__ = "0.1.0"
