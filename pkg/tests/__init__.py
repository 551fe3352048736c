"""
Test suite for the LDOI toolkit

This module contains all tests for the invariant-matrix core, covariant maps,
the family gallery, the detection service and the CLI.
"""
