"""
Symatch Errors
Root of the exception hierarchy shared by all core modules
"""


class SymatchError(Exception):
    """Base exception for every recoverable symatch failure"""
    pass
