"""Test suite for twincontract."""
