"""Exception hierarchy.

Every error raised by the package derives from :class:`GridCyberError`.  The
three mid-level classes map onto command-line exit codes.
"""

from __future__ import annotations


class GridCyberError(Exception):
    exit_code = 1


class SettingsError(GridCyberError):
    exit_code = 2


class InputError(GridCyberError):
    exit_code = 3


class GenerationError(GridCyberError):
    exit_code = 4
