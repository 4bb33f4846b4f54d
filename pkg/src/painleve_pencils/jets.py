"""First-order dual numbers, used to push tangent directions through chart formulas."""


class Dual:
    """value + eps * deriv with eps**2 = 0."""

    __slots__ = ("value", "deriv")

    def __init__(self, value, deriv=0):
        self.value = complex(value)
        self.deriv = complex(deriv)

    @staticmethod
    def _lift(other):
        return other if isinstance(other, Dual) else Dual(other, 0)

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.value, -self.deriv)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return Dual(self.value / o.value, (self.deriv * o.value - self.value * o.deriv) / (o.value * o.value))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("Dual supports integer powers only")
        if n < 0:
            return 1 / self ** (-n)
        out = Dual(1)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self):
        return f"Dual({self.value!r}, {self.deriv!r})"


def value_of(v):
    return v.value if isinstance(v, Dual) else complex(v)


def deriv_of(v):
    return v.deriv if isinstance(v, Dual) else 0j
