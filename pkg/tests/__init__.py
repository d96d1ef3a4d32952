"""
Test suite for the turnover toolkit.
"""
