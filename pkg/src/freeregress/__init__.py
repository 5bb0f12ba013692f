"""
freeregress - Free Poisson and Free Binomial Regression Characterizations
"""

__version__ = "0.1.0"
__author__ = "Community"
