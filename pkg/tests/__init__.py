"""
Test suite for unimodal-dpm.
"""
