"""Internal utils."""


class NoInit(type):
    """
    Metaclass that doesn't call __init__ automatically when __new__ is
    called on a class.
    """

    def __call__(cls, *args, **kwargs):
        return cls.__new__(cls, *args, **kwargs)


def long_option(name: str) -> str:
    """``work_dir`` -> ``--work-dir``; a trailing ``_`` is dropped."""
    return "--" + name.rstrip("_").replace("_", "-")


def command_name(name: str) -> str:
    """``mu_seq`` -> ``mu-seq``."""
    return name.rstrip("_").replace("_", "-")


class reassignable_property:
    """
    Property whose getter can be replaced per instance.

    Assigning a callable installs it as the getter for that instance;
    assigning anything else makes the property return that value. The getter
    receives the instance as its only argument.
    """

    def __init__(self, getter):
        self.getter = getter
        self.name = None
        self.__doc__ = getter.__doc__

    def __set_name__(self, owner, name):
        self.name = name

    def __get__(self, instance, owner):
        if instance is None:
            return self
        getter = instance.__dict__.get(self.name, self.getter)
        return getter(instance)

    def __set__(self, instance, value):
        if callable(value):
            instance.__dict__[self.name] = value
        else:
            instance.__dict__[self.name] = lambda _: value

    def __delete__(self, instance):
        instance.__dict__.pop(self.name, None)
