from germlab._util import (
    NoInit,
    command_name,
    long_option,
    reassignable_property,
)


def create_class_with_reassignable_properties():
    class C:
        @reassignable_property
        def prop1(self) -> str:
            return "prop1_value"

        @reassignable_property
        def prop2(self) -> int:
            return 2

    return C


class TestReassignableProperty:
    def test_essentials(self):
        C = create_class_with_reassignable_properties()
        c = C()
        assert c.prop1 == "prop1_value"
        assert c.prop2 == 2

        c.prop1 = "new"
        assert c.prop1 == "new"

        c.prop2 = lambda instance: instance.prop1
        assert c.prop2 == c.prop1

        c.prop1 = "prop1_new"
        assert c.prop2 == "prop1_new"

    def test_delete(self):
        C = create_class_with_reassignable_properties()
        c = C()
        c.prop1 = "prop1_new"
        del c.prop1
        assert c.prop1 == "prop1_value"

    def test_instances_are_independent(self):
        C = create_class_with_reassignable_properties()
        c, d = C(), C()
        c.prop1 = "c_prop1"
        assert d.prop1 == "prop1_value"
        assert C.prop1.__doc__ is None


class TestNames:
    def test_long_option(self):
        assert long_option("scenario") == "--scenario"
        assert long_option("display_order") == "--display-order"
        assert long_option("range_") == "--range"

    def test_command_name(self):
        assert command_name("mu_seq") == "mu-seq"
        assert command_name("fixed_points") == "fixed-points"
        assert command_name("codim") == "codim"


class TestNoInit:
    def test_init_not_called(self):
        calls = []

        class C(metaclass=NoInit):
            def __new__(cls, value):
                obj = super().__new__(cls)
                obj.value = value
                return obj

            def __init__(self, value):
                calls.append(value)

        c = C(3)
        assert c.value == 3 and calls == []
