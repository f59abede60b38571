"""
Utility functions and helpers for the application
"""
