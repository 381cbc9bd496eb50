"""Run-wide settings."""
from contextvars import ContextVar

# Context vars are declared globally; the Context class is a view on them.
from typing import Tuple

__all__ = ("Context", "context")

_cap = ContextVar("cap", default=32)
_minor_limit = ContextVar("minor_limit", default=20000)
_workers = ContextVar("workers", default=1)
_display_order = ContextVar("display_order", default=3)
_samples = ContextVar("samples", default=(-5, 5))


class Context:
    """
    Defaults used when an operation is called without an explicit value.

    Use as a context manager to override settings temporarily:

    >>> with Context(cap=16):
    ...     codim(ideal)  # runs with cap 16
    """

    @property
    def cap(self) -> int:
        """Highest truncation order tried by the stopping rule."""
        return _cap.get()

    @cap.setter
    def cap(self, value: int):
        if value < 1:
            raise ValueError("cap must be positive")
        self._set_var(_cap, value)

    @property
    def minor_limit(self) -> int:
        """Maximum number of minors enumerated for exceptional conditions."""
        return _minor_limit.get()

    @minor_limit.setter
    def minor_limit(self, value: int):
        self._set_var(_minor_limit, value)

    @property
    def workers(self) -> int:
        """Threads used to evaluate the entries of a mu sequence."""
        return _workers.get()

    @workers.setter
    def workers(self, value: int):
        if value < 1:
            raise ValueError("workers must be positive")
        self._set_var(_workers, value)

    @property
    def display_order(self) -> int:
        """Truncation order of display commands without ``--order``."""
        return _display_order.get()

    @display_order.setter
    def display_order(self, value: int):
        self._set_var(_display_order, value)

    @property
    def samples(self) -> Tuple[int, int]:
        """Inclusive range of integer times used for sampling."""
        return _samples.get()

    @samples.setter
    def samples(self, value: Tuple[int, int]):
        self._set_var(_samples, tuple(value))

    def __init__(
        self,
        cap=None,
        minor_limit=None,
        workers=None,
        display_order=None,
        samples=None,
    ):
        self._reset = {}
        self._pending = {
            "cap": cap,
            "minor_limit": minor_limit,
            "workers": workers,
            "display_order": display_order,
            "samples": samples,
        }

    def __enter__(self):
        for name, value in self._pending.items():
            if value is not None:
                setattr(self, name, value)
        return self

    def __exit__(self, _1, _2, _3):
        for key, token in reversed(list(self._reset.items())):
            key.reset(token)
        self._reset.clear()

    def _set_var(self, var: ContextVar, value):
        token = var.set(value)
        self._reset.setdefault(var, token)


#: Use this to query the current settings.
context = Context()
