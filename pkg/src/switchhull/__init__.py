"""Convex hulls for quadratic optimization with switching variables (n = 1, 2)."""
