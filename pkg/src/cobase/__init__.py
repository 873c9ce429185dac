"""Constructive two-element bases for coprime linear groups over finite fields."""

__version__ = "0.1.0"
