"""
Machine-vision grading of tomatoes and eggs.

Images are reduced to normalized RGB spectral patterns, classified by
feed-forward networks, and the network structure is found by an
artificial-chemistry search.
"""

__version__ = '0.1'
