"""Test suite for mcflab."""
