"""Exact field arithmetic: Q, prime fields F_p, and small extensions F_p[x]/(f).

A Field object does arithmetic on raw values (Fraction for Q, int residues
for F_p, int tuples for F_p[x]/(f)); FieldScalar is the boxed scalar used at
API boundaries.  Finite fields expose a dense code in [0, q) so that hot
linear algebra can run on integer arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch, InvalidField


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Serializable description of a supported field."""

    kind: str                      # "q" | "fp" | "fpk"
    p: int = 0
    modulus: tuple = ()            # monic, coefficients low-to-high, over F_p

    def characteristic(self) -> int:
        return 0 if self.kind == "q" else self.p

    def to_json(self) -> dict:
        if self.kind == "q":
            return {"type": "q"}
        if self.kind == "fp":
            return {"type": "fp", "p": self.p}
        return {"type": "fpk", "p": self.p, "modulus": list(self.modulus)}

    @staticmethod
    def from_json(obj: dict) -> "FieldSpec":
        t = obj.get("type")
        if t == "q":
            return rationals()
        if t == "fp":
            return prime_field(int(obj["p"]))
        if t == "fpk":
            return extension_field(int(obj["p"]), [int(c) for c in obj["modulus"]])
        raise InvalidField(f"unknown field type {t!r}")


def rationals() -> FieldSpec:
    return FieldSpec("q")


def prime_field(p: int) -> FieldSpec:
    if not _is_prime(p):
        raise InvalidField(f"{p} is not prime")
    return FieldSpec("fp", p)


def extension_field(p: int, modulus) -> FieldSpec:
    """F_p[x]/(modulus); modulus monic of degree 2..4, irreducible over F_p."""
    if not _is_prime(p):
        raise InvalidField(f"{p} is not prime")
    mod = tuple(c % p for c in modulus)
    deg = len(mod) - 1
    if deg < 1 or mod[-1] != 1:
        raise InvalidField("modulus must be monic of degree >= 1")
    if deg > 4:
        raise InvalidField("extension degree limited to 4")
    if deg >= 2 and not _irreducible_mod_p(mod, p):
        raise InvalidField(f"modulus {list(mod)} is reducible over F_{p}")
    return FieldSpec("fpk", p, mod)


def _poly_eval_mod(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _irreducible_mod_p(mod, p) -> bool:
    # degree <= 4: no roots rules out degrees 2 and 3; degree 4 additionally
    # needs no monic irreducible quadratic factor (exhaustive trial division).
    deg = len(mod) - 1
    for x in range(p):
        if _poly_eval_mod(mod, x, p) == 0:
            return False
    if deg == 4:
        for b in range(p):
            for c in range(p):
                quad = (c, b, 1)
                if any(_poly_eval_mod(quad, x, p) == 0 for x in range(p)):
                    continue
                if _poly_divides_mod(quad, mod, p):
                    return False
    return True


def _poly_divides_mod(div, poly, p) -> bool:
    rem = list(poly)
    dd = len(div) - 1
    while len(rem) - 1 >= dd:
        lead = rem[-1] % p
        if lead == 0:
            rem.pop()
            continue
        shift = len(rem) - 1 - dd
        for i, c in enumerate(div):
            rem[shift + i] = (rem[shift + i] - lead * c) % p
        rem.pop()
    return all(c % p == 0 for c in rem)


class Field:
    """Arithmetic engine over raw values.  Subclasses fix the representation."""

    spec: FieldSpec
    zero = None
    one = None
    size = None          # number of elements, None for Q

    def characteristic(self):
        return self.spec.characteristic()

    def is_zero(self, a) -> bool:
        return a == self.zero

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sum(self, values):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    # dense codes (finite fields only)
    def code(self, a) -> int:
        raise InvalidField("codes only defined for finite fields")

    def decode(self, c: int):
        raise InvalidField("codes only defined for finite fields")

    def elements(self):
        raise InvalidField("cannot enumerate an infinite field")

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Field({self.spec})"


class RationalField(Field):
    def __init__(self):
        self.spec = rationals()
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / Fraction(a)

    def from_int(self, n):
        return Fraction(n)

    def to_str(self, a):
        return str(a)

    def parse(self, s):
        return Fraction(s)


class PrimeField(Field):
    def __init__(self, p: int):
        self.spec = prime_field(p)
        self.p = p
        self.zero = 0
        self.one = 1 % p
        self.size = p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of 0 in F_{self.p}")
        return pow(a, -1, self.p)

    def from_int(self, n):
        return n % self.p

    def to_str(self, a):
        return str(a)

    def parse(self, s):
        return int(s) % self.p

    def code(self, a):
        return a

    def decode(self, c):
        return c

    def elements(self):
        return range(self.p)


class ExtensionField(Field):
    """F_p[x]/(modulus), values are tuples of length deg(modulus)."""

    def __init__(self, p: int, modulus):
        self.spec = extension_field(p, modulus)
        self.p = p
        self.mod = self.spec.modulus
        self.deg = len(self.mod) - 1
        self.zero = (0,) * self.deg
        one = [0] * self.deg
        one[0] = 1 % p
        self.one = tuple(one)
        self.size = p ** self.deg

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.deg
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the monic modulus
        for i in range(len(prod) - 1, k - 1, -1):
            c = prod[i]
            if c:
                for j in range(self.deg + 1):
                    prod[i - self.deg + j] = (prod[i - self.deg + j] - c * self.mod[j]) % p
        return tuple(prod[:k])

    def inv(self, a):
        if all(x == 0 for x in a):
            raise DivisionByZero("inverse of 0 in extension field")
        # a^(q-2) = a^{-1} in F_q
        result = self.one
        base = a
        e = self.size - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def from_int(self, n):
        v = [0] * self.deg
        v[0] = n % self.p
        return tuple(v)

    def generator(self):
        """The class of x."""
        v = [0] * self.deg
        if self.deg == 1:
            raise InvalidField("degree-1 extension has no x generator")
        v[1] = 1
        return tuple(v)

    def to_str(self, a):
        return "[" + ",".join(str(c) for c in a) + "]"

    def parse(self, s):
        if isinstance(s, (list, tuple)):
            v = [int(c) % self.p for c in s]
        else:
            body = s.strip().strip("[]")
            v = [int(c) % self.p for c in body.split(",")] if body else []
        v += [0] * (self.deg - len(v))
        if len(v) != self.deg:
            raise InvalidField("bad extension element")
        return tuple(v)

    def code(self, a):
        c = 0
        for x in reversed(a):
            c = c * self.p + x
        return c

    def decode(self, c):
        v = []
        for _ in range(self.deg):
            v.append(c % self.p)
            c //= self.p
        return tuple(v)

    def elements(self):
        return (self.decode(c) for c in range(self.size))


_FIELD_CACHE: dict = {}


def make_field(spec: FieldSpec) -> Field:
    if spec not in _FIELD_CACHE:
        if spec.kind == "q":
            _FIELD_CACHE[spec] = RationalField()
        elif spec.kind == "fp":
            _FIELD_CACHE[spec] = PrimeField(spec.p)
        else:
            _FIELD_CACHE[spec] = ExtensionField(spec.p, spec.modulus)
    return _FIELD_CACHE[spec]


class FieldScalar:
    """Boxed field element with canonical representation equality."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _check(self, other):
        if not isinstance(other, FieldScalar):
            other = FieldScalar(self.field, self.field.from_int(int(other)))
        if other.field.spec != self.field.spec:
            raise FieldMismatch(f"{self.field.spec} vs {other.field.spec}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return FieldScalar(self.field, self.field.add(self.value, o.value))

    def __sub__(self, other):
        o = self._check(other)
        return FieldScalar(self.field, self.field.sub(self.value, o.value))

    def __mul__(self, other):
        o = self._check(other)
        return FieldScalar(self.field, self.field.mul(self.value, o.value))

    def __truediv__(self, other):
        o = self._check(other)
        return FieldScalar(self.field, self.field.div(self.value, o.value))

    def __neg__(self):
        return FieldScalar(self.field, self.field.neg(self.value))

    def inv(self):
        return FieldScalar(self.field, self.field.inv(self.value))

    def is_zero(self):
        return self.field.is_zero(self.value)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return (isinstance(other, FieldScalar)
                and self.field.spec == other.field.spec
                and self.value == other.value)

    def __hash__(self):
        return hash((self.field.spec, self.value))

    def __repr__(self):
        return self.field.to_str(self.value)


def scalar(field: Field, x) -> FieldScalar:
    if isinstance(x, FieldScalar):
        return x
    if isinstance(x, int):
        return FieldScalar(field, field.from_int(x))
    return FieldScalar(field, x)


# ---------------------------------------------------------------------------
# polynomials over a Field; coefficients low-to-high as raw values


def poly_trim(field, coeffs):
    c = list(coeffs)
    while c and field.is_zero(c[-1]):
        c.pop()
    return c


def poly_eval(field, coeffs, x):
    acc = field.zero
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_mul(field, a, b):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if field.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return out


def poly_divmod(field, a, b):
    b = poly_trim(field, b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    q = [field.zero] * max(0, len(a) - len(b) + 1)
    inv_lead = field.inv(b[-1])
    while len(poly_trim(field, a)) >= len(b):
        a = poly_trim(field, a)
        shift = len(a) - len(b)
        coef = field.mul(a[-1], inv_lead)
        q[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] = field.sub(a[shift + i], field.mul(coef, c))
    return poly_trim(field, q), poly_trim(field, a)


def _divisors(n: int):
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _rational_root_candidates(coeffs):
    """Candidates p/q for integer coefficient list, by the rational root theorem."""
    lead = coeffs[-1]
    const = next(c for c in coeffs if c != 0)
    cands = set()
    for num in _divisors(const):
        for den in _divisors(lead):
            cands.add(Fraction(num, den))
            cands.add(Fraction(-num, den))
    return cands


def all_roots(field: Field, coeffs):
    """All roots of the polynomial lying in the field, with multiplicities.

    Finite fields: exhaustive evaluation with repeated deflation.  Q: clear
    denominators and apply the rational root theorem, then deflate.
    """
    coeffs = poly_trim(field, coeffs)
    if not coeffs:
        raise DivisionByZero("all_roots of the zero polynomial")
    roots = []
    if field.size is not None:
        poly = coeffs
        for x in field.elements():
            mult = 0
            while len(poly) > 1 and field.is_zero(poly_eval(field, poly, x)):
                poly, rem = poly_divmod(field, poly, [field.neg(x), field.one])
                assert not rem
                mult += 1
            if mult:
                roots.append((x, mult))
        return roots
    # Q: strip x^k, clear denominators to integers
    k = 0
    while coeffs and field.is_zero(coeffs[0]):
        coeffs = coeffs[1:]
        k += 1
    if k:
        roots.append((Fraction(0), k))
    if len(coeffs) <= 1:
        return roots
    denlcm = 1
    for c in coeffs:
        denlcm = denlcm * c.denominator // _gcd(denlcm, c.denominator)
    ints = [int(c * denlcm) for c in coeffs]
    for cand in sorted(_rational_root_candidates(ints)):
        poly = coeffs
        mult = 0
        while len(poly) > 1 and poly_eval(field, poly, cand) == 0:
            poly, rem = poly_divmod(field, poly, [-cand, Fraction(1)])
            assert not rem
            mult += 1
        if mult:
            roots.append((cand, mult))
    return roots


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
