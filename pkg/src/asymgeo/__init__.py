"""Asymmetric norms and KL geometry on finite sample spaces."""
