"""Arithmetic in GF(q^m).

Elements are plain Python ints in ``range(q**m)``. The integer is the radix-q
encoding of the coefficient vector, coefficient of ``x^0`` in the least
significant digit, so ``0`` is the zero element, ``1`` is the unit and ``q``
is the class of ``x``. :meth:`GF.coeffs` and :meth:`GF.element` convert
between the two views.

Polynomials over Z_q used internally (moduli, Euclid) are coefficient lists,
lowest degree first.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, UsageError

MAX_ORDER = 2**63
ENUMERATION_CAP = 2**20
_TABLE_ORDER = 2**16  # log/antilog tables below this order
_ADD_TABLE_ORDER = 256

# Conway polynomials, coefficients x^0 .. x^m (monic).
CONWAY = {
    (2, 1): (1, 1), (2, 2): (1, 1, 1), (2, 3): (1, 1, 0, 1), (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1), (3, 2): (2, 2, 1), (3, 3): (1, 2, 0, 1), (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1), (5, 2): (2, 4, 1), (5, 3): (3, 3, 0, 1), (5, 4): (2, 4, 4, 0, 1),
    (7, 1): (4, 1), (7, 2): (3, 6, 1), (7, 3): (4, 0, 6, 1), (7, 4): (3, 4, 5, 0, 1),
    (11, 1): (9, 1), (11, 2): (2, 7, 1), (11, 3): (9, 2, 0, 1), (11, 4): (2, 10, 8, 0, 1),
    (13, 1): (11, 1), (13, 2): (2, 12, 1), (13, 3): (11, 2, 0, 1), (13, 4): (2, 12, 3, 0, 1),
}


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over Z_q -------------------------------------------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a, b, q):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, q)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv_lead % q
        shift = len(a) - len(b)
        quo[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % q
        a = _trim(a)
    return _trim(quo), a


def _pmul(a, b, q):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % q
    return _trim(out)


def _psub(a, b, q):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % q for x, y in zip(a, b)])


def _pmulmod(a, b, f, q):
    return _pdivmod(_pmul(a, b, q), f, q)[1]


def _ppowmod(a, e, f, q):
    result, base = [1], _pdivmod(a, f, q)[1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, q)
        base = _pmulmod(base, base, f, q)
        e >>= 1
    return result


def _pgcd(a, b, q):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b, q)[1]
    return a


def is_irreducible(modulus, q):
    """Ben-Or test: f of degree m is irreducible iff gcd(x^(q^i) - x, f) = 1 for i <= m/2."""
    f = _trim(modulus)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    xq = [0, 1]
    for _ in range(m // 2):
        xq = _ppowmod(xq, q, f, q)
        if len(_pgcd(f, _psub(xq, [0, 1], q), q)) > 1:
            return False
    return True


def first_irreducible(q, m):
    """Smallest monic irreducible of degree m in radix-q order of its low coefficients."""
    for idx in range(q**m):
        low = [(idx // q**i) % q for i in range(m)]
        if is_irreducible(low + [1], q):
            return tuple(low + [1])
    raise UsageError(f"no irreducible polynomial of degree {m} over Z_{q}")


class GF:
    """The finite field GF(q^m), defined by a monic irreducible ``modulus``.

    Instances are immutable and compare equal when (q, m, modulus) agree.
    When no modulus is given the built-in Conway polynomial is used, or the
    first irreducible in radix order for (q, m) outside the table.
    """

    def __init__(self, q, m=1, modulus=None):
        if not isinstance(q, int) or not is_prime(q):
            raise UsageError(f"q={q!r} is not a prime")
        if not isinstance(m, int) or m < 1:
            raise UsageError(f"extension degree m={m!r} must be >= 1")
        if q**m > MAX_ORDER:
            raise CapacityError(f"field order {q}^{m} exceeds 2^63")
        if modulus is None:
            modulus = CONWAY.get((q, m)) or first_irreducible(q, m)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise UsageError(f"modulus must be monic of degree {m}: {modulus}")
        if any(not 0 <= c < q for c in modulus):
            raise UsageError(f"modulus coefficients must lie in [0, {q})")
        if not is_irreducible(modulus, q):
            raise UsageError(f"modulus {modulus} is reducible over Z_{q}")
        self.q = q
        self.m = m
        self.modulus = modulus
        self.order = q**m
        self._exp = self._log = self._add_tab = None
        if m > 1 and self.order <= _TABLE_ORDER:
            self._build_tables()

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.q})"
        return f"GF({self.q}^{self.m}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.q, self.m, self.modulus)

    # -- representation ---------------------------------------------------------

    def coeffs(self, a):
        """Coefficient tuple (x^0 first, length m) of element ``a``."""
        self.check(a)
        q = self.q
        return tuple((a // q**i) % q for i in range(self.m))

    def element(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            raise UsageError(f"expected at most {self.m} coefficients, got {len(coeffs)}")
        value = 0
        for i, c in enumerate(coeffs):
            if not 0 <= c < self.q:
                raise UsageError(f"coefficient {c} outside [0, {self.q})")
            value += c * self.q**i
        return value

    def check(self, a):
        if not isinstance(a, (int, np.integer)) or not 0 <= a < self.order:
            raise UsageError(f"{a!r} is not an element of {self!r}")
        return int(a)

    # -- arithmetic -------------------------------------------------------------

    def add(self, a, b):
        if self.m == 1:
            return (a + b) % self.q
        if self._add_tab is not None:
            return self._add_tab[a][b]
        return self._digitwise(a, b, 1)

    def sub(self, a, b):
        if self.m == 1:
            return (a - b) % self.q
        return self._digitwise(a, b, -1)

    def neg(self, a):
        return self.sub(0, a)

    def _digitwise(self, a, b, sign):
        q, out, place = self.q, 0, 1
        for _ in range(self.m):
            out += ((a % q + sign * (b % q)) % q) * place
            a //= q
            b //= q
            place *= q
        return out

    def mul(self, a, b):
        if self.m == 1:
            return a * b % self.q
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._from_poly(_pmulmod(self._poly(a), self._poly(b), self.modulus, self.q))

    def inv(self, a):
        """Multiplicative inverse by extended Euclid; raises on zero."""
        if a == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self!r}")
        if self.m == 1:
            return pow(a, -1, self.q)
        q = self.q
        r0, r1 = list(self.modulus), self._poly(a)
        s0, s1 = [], [1]
        while r1:
            quo, rem = _pdivmod(r0, r1, q)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(quo, s1, q), q)
        # r0 is a nonzero constant since the modulus is irreducible
        c = pow(r0[0], -1, q)
        return self._from_poly([x * c % q for x in s0])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        """``a**e`` by square-and-multiply, with ``0**0 == 1``."""
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def _poly(self, a):
        q, out = self.q, []
        while a:
            out.append(a % q)
            a //= q
        return out

    def _from_poly(self, p):
        return sum(c * self.q**i for i, c in enumerate(p))

    def _build_tables(self):
        n = self.order - 1
        factors = _prime_factors(n)
        x_poly = list(self.modulus)
        for g in range(2, self.order):
            gp = self._poly(g)
            if all(_ppowmod(gp, n // p, x_poly, self.q) != [1] for p in factors):
                break
        exp = [0] * (2 * n)
        log = [0] * self.order
        cur = [1]
        gp = self._poly(g)
        for i in range(n):
            v = self._from_poly(cur)
            exp[i] = exp[i + n] = v
            log[v] = i
            cur = _pmulmod(cur, gp, x_poly, self.q)
        self._exp, self._log = exp, log
        self.generator = g
        if self.order <= _ADD_TABLE_ORDER:
            self._add_tab = [[self._digitwise(a, b, 1) for b in range(self.order)]
                             for a in range(self.order)]

    # -- enumeration and sampling ----------------------------------------------

    def elements(self, cap=ENUMERATION_CAP):
        """All elements in canonical (radix-q index) order: 0, 1, ..."""
        if self.order > cap:
            raise CapacityError(f"{self!r} has {self.order} elements, above the cap {cap}")
        return range(self.order)

    def nonzero(self, cap=ENUMERATION_CAP):
        return self.elements(cap)[1:]

    def sample(self, rng, nonzero=False):
        """Uniform element (or uniform nonzero element, by rejection)."""
        while True:
            a = int(rng.integers(0, self.order, dtype=np.uint64))
            if a or not nonzero:
                return a

    def sample_block(self, rng, length, nonzero=False):
        """Uniform block of ``length`` symbols; ``nonzero`` rejects the all-zero block."""
        while True:
            block = tuple(self.sample(rng) for _ in range(length))
            if any(block) or not nonzero:
                return block
