"""
Test suite for the graph kernel library, CLI and API.
"""
