"""
Verification suites for fblab.
Contains the tolerance table, suite specifications and the check runners.
"""
