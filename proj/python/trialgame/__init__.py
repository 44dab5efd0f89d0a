"""Incentive-aware hypothesis testing toolkit.

Posterior/FDR bounds implied by an agent's decision to run a costly
trial, exact Bayesian quantities for discrete priors under the Gaussian
p-value model, and a seeded Monte Carlo simulator of the full
principal-agent trial game.
"""

from ._trialgame import *  # noqa: F401,F403

__version__ = "0.1.0"
