"""Bayesian information cascades: exact belief updates, simulation and experiments."""
