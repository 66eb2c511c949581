"""Unit test package for wentzell."""
