"""
Tests for the fblab package.
"""
