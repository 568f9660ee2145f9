"""
UC-CET Center-Point Solver - Source Package
"""

__version__ = "1.0.0"
__description__ = "Unit commitment with carbon emission trading solved by a center-point algorithm"
