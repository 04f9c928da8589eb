"""Tests for the G-irregular prime toolkit."""
