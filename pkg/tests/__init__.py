"""
Unit tests for the hier-tree spheromorphism library
"""
