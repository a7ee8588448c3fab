from .driver import _entry

_entry()
