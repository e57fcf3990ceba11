"""Exact rational sum-of-squares certificates of polynomial non-negativity."""
