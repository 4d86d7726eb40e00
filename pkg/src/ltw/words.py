"""Grammar-compressed words (straight-line programs).

Every word the transducer machinery touches -- rule outputs, shortest words,
handles, periods -- lives in an append-only :class:`SlpPool` and is addressed
by a :class:`WordRef`.  Lengths are exact Python integers, so words like
a**(2**60) are first-class values; structural operations (strip, rotate,
reverse, power) add O(depth) or O(log k) nodes and never expand.

Equality is strategy-based: the default compares Karp-Rabin fingerprints over
a random 128-bit prime (per-comparison error at most len/2**127, i.e. below
2**-67 for lengths up to 2**60); ``exact`` expands both sides under a cap;
``verify`` runs the fingerprint and then the exact comparison whenever both
sides fit under the cap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

DEFAULT_EXPAND_CAP = 10 ** 6

_EMPTY, _LIT, _CAT = 0, 1, 2

_MODES = ("fingerprint", "exact", "verify")


class CapExceeded(Exception):
    """An operation would materialize more symbols than the cap allows."""

    def __init__(self, length, cap):
        super().__init__(f"word of length {length} exceeds cap {cap}")
        self.length = length
        self.cap = cap


class OutOfRange(ValueError):
    pass


class PoolMismatch(ValueError):
    pass


def valid_symbol(ch: str) -> bool:
    """Symbols are single printable 8-bit characters (no control codes)."""
    if len(ch) != 1:
        return False
    o = ord(ch)
    return 32 <= o <= 126 or 160 <= o <= 255


@dataclass(frozen=True)
class WordRef:
    """Handle to one word: a pool plus a node id inside it.

    Two WordRefs may denote equal words without being equal handles; use
    :func:`equals` for word equality.
    """

    pool: "SlpPool"
    node: int

    @property
    def length(self) -> int:
        return self.pool._len[self.node]

    def __repr__(self):
        n = self.length
        if n <= 24:
            return f"WordRef({expand(self)!r})"
        return f"WordRef(len={n})"


class SlpPool:
    """Append-only table of word productions: Empty, Literal, Concat.

    Node ids reference only earlier ids, so the derivation graph is acyclic
    by construction and every node denotes exactly one word.
    """

    def __init__(self):
        self._kind = [_EMPTY]
        self._left = [0]
        self._right = [0]
        self._sym = [""]
        self._len = [0]
        self._chars: dict[str, int] = {}
        self._fp: dict[object, list] = {}

    def __len__(self):
        return len(self._kind)

    @property
    def empty(self) -> WordRef:
        return WordRef(self, 0)

    def _push(self, kind, left, right, sym, ln) -> int:
        self._kind.append(kind)
        self._left.append(left)
        self._right.append(right)
        self._sym.append(sym)
        self._len.append(ln)
        return len(self._kind) - 1

    def _char(self, ch: str) -> int:
        nid = self._chars.get(ch)
        if nid is None:
            if not valid_symbol(ch):
                raise ValueError(f"invalid output symbol: {ch!r}")
            nid = self._push(_LIT, 0, 0, ch, 1)
            self._chars[ch] = nid
        return nid

    def literal(self, symbols: str) -> WordRef:
        """The word consisting of exactly `symbols` (balanced concatenation)."""
        if not symbols:
            return self.empty
        ids = [self._char(c) for c in symbols]
        while len(ids) > 1:
            nxt = []
            for i in range(0, len(ids) - 1, 2):
                a, b = ids[i], ids[i + 1]
                nxt.append(self._push(_CAT, a, b, "", self._len[a] + self._len[b]))
            if len(ids) % 2:
                nxt.append(ids[-1])
            ids = nxt
        return WordRef(self, ids[0])

    def concat(self, a: WordRef, b: WordRef) -> WordRef:
        if a.pool is not self or b.pool is not self:
            raise PoolMismatch("operands belong to a different pool")
        if a.length == 0:
            return b
        if b.length == 0:
            return a
        return WordRef(self, self._push(_CAT, a.node, b.node, "", a.length + b.length))

    def concat_all(self, refs) -> WordRef:
        out = self.empty
        for r in refs:
            out = self.concat(out, r)
        return out


def length(w: WordRef) -> int:
    return w.length


def concat(a: WordRef, b: WordRef) -> WordRef:
    return a.pool.concat(a, b)


def expand(w: WordRef, cap: int = DEFAULT_EXPAND_CAP) -> str:
    """Materialize the word as a str; CapExceeded if longer than `cap`."""
    if w.length > cap:
        raise CapExceeded(w.length, cap)
    pool, out = w.pool, []
    kind, left, right, sym = pool._kind, pool._left, pool._right, pool._sym
    stack = [w.node]
    while stack:
        n = stack.pop()
        k = kind[n]
        if k == _LIT:
            out.append(sym[n])
        elif k == _CAT:
            stack.append(right[n])
            stack.append(left[n])
    return "".join(out)


# -- equality ----------------------------------------------------------------

def _probably_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Fingerprinter:
    """Karp-Rabin summaries over a random 128-bit prime.

    Summaries are triples (length, hash, base**length mod p); concatenation
    composes them in O(1), so a summary of any pool node costs one pass over
    the nodes below it (cached per pool).
    """

    def __init__(self, seed: int = 0):
        rng = random.Random(seed)
        while True:
            c = rng.getrandbits(128) | (1 << 127) | 1
            if _probably_prime(c):
                self.prime = c
                break
        self.base = rng.randrange(2, self.prime - 1)

    def triple(self, w: WordRef) -> tuple[int, int, int]:
        pool = w.pool
        cache = pool._fp.get(self)
        if cache is None:
            cache = pool._fp[self] = []
        if len(cache) <= w.node:
            p, b = self.prime, self.base
            kind, left, right, sym = pool._kind, pool._left, pool._right, pool._sym
            for n in range(len(cache), w.node + 1):
                k = kind[n]
                if k == _EMPTY:
                    cache.append((0, 1))
                elif k == _LIT:
                    cache.append((ord(sym[n]) % p, b % p))
                else:
                    f1, p1 = cache[left[n]]
                    f2, p2 = cache[right[n]]
                    cache.append(((f1 * p2 + f2) % p, p1 * p2 % p))
        f, pw = cache[w.node]
        return (w.length, f, pw)


_config = {"seed": 0, "mode": "fingerprint", "fp": None}


def set_equality_seed(seed: int) -> None:
    _config["seed"] = seed
    _config["fp"] = None


def set_equality_mode(mode: str) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    _config["mode"] = mode


def equality_mode() -> str:
    return _config["mode"]


def equality_seed() -> int:
    return _config["seed"]


def fingerprinter() -> Fingerprinter:
    fp = _config["fp"]
    if fp is None:
        fp = _config["fp"] = Fingerprinter(_config["seed"])
    return fp


def equals(a: WordRef, b: WordRef, mode: str | None = None,
           cap: int = DEFAULT_EXPAND_CAP) -> bool:
    """Word equality under the configured (or given) strategy.

    Fingerprint mode may err toward True with probability at most
    len/2**127 per comparison; exact mode never errs but raises
    CapExceeded beyond `cap`.
    """
    if a.length != b.length:
        return False
    if a.pool is b.pool and a.node == b.node:
        return True
    mode = mode or _config["mode"]
    if mode == "exact":
        return expand(a, cap) == expand(b, cap)
    fp = fingerprinter()
    ans = fp.triple(a) == fp.triple(b)
    if mode == "verify" and a.length <= cap:
        return expand(a, cap) == expand(b, cap)
    return ans


# -- structure ---------------------------------------------------------------

def strip_prefix(w: WordRef, n: int) -> WordRef:
    """The word with its first n symbols removed."""
    if n < 0 or n > w.length:
        raise OutOfRange(f"cannot strip {n} symbols from a word of length {w.length}")
    pool = w.pool
    kind, left, right, lens = pool._kind, pool._left, pool._right, pool._len
    rights = []
    cur, k = w.node, n
    while k:
        kd = kind[cur]
        if kd == _LIT:
            cur = 0
            break
        a, b = left[cur], right[cur]
        la = lens[a]
        if k >= la:
            cur, k = b, k - la
        else:
            rights.append(b)
            cur = a
    out = WordRef(pool, cur)
    for b in reversed(rights):
        out = pool.concat(out, WordRef(pool, b))
    return out


def strip_suffix(w: WordRef, n: int) -> WordRef:
    """The word with its last n symbols removed."""
    if n < 0 or n > w.length:
        raise OutOfRange(f"cannot strip {n} symbols from a word of length {w.length}")
    pool = w.pool
    kind, left, right, lens = pool._kind, pool._left, pool._right, pool._len
    lefts = []
    cur, k = w.node, n
    while k:
        kd = kind[cur]
        if kd == _LIT:
            cur = 0
            break
        a, b = left[cur], right[cur]
        lb = lens[b]
        if k >= lb:
            cur, k = a, k - lb
        else:
            lefts.append(a)
            cur = b
    out = WordRef(pool, cur)
    for a in reversed(lefts):
        out = pool.concat(WordRef(pool, a), out)
    return out


def prefix(w: WordRef, n: int) -> WordRef:
    return strip_suffix(w, w.length - n)


def rotate_left(w: WordRef, n: int) -> WordRef:
    """Move the first n (mod length) symbols to the end."""
    if w.length == 0:
        return w
    n %= w.length
    if n == 0:
        return w
    return concat(strip_prefix(w, n), prefix(w, n))


def reverse(w: WordRef) -> WordRef:
    pool = w.pool
    kind, left, right = pool._kind, pool._left, pool._right
    memo: dict[int, int] = {}
    stack = [w.node]
    while stack:
        n = stack[-1]
        if n in memo:
            stack.pop()
            continue
        k = kind[n]
        if k != _CAT:
            memo[n] = n
            stack.pop()
            continue
        a, b = left[n], right[n]
        if a in memo and b in memo:
            memo[n] = pool._push(_CAT, memo[b], memo[a], "",
                                 pool._len[a] + pool._len[b])
            stack.pop()
        else:
            stack.append(a)
            stack.append(b)
    return WordRef(pool, memo[w.node])


def power(p: WordRef, k: int) -> WordRef:
    """p repeated k times, in O(log k) nodes."""
    if k < 0:
        raise OutOfRange("negative power")
    pool = p.pool
    out, sq = pool.empty, p
    while k:
        if k & 1:
            out = pool.concat(out, sq)
        k >>= 1
        if k:
            sq = pool.concat(sq, sq)
    return out


def is_power_of(w: WordRef, p: WordRef) -> bool:
    """True iff w == p**k for some k >= 0."""
    if w.length == 0:
        return True
    if p.length == 0 or w.length % p.length:
        return False
    return equals(w, power(p, w.length // p.length))


# -- primitive roots ---------------------------------------------------------

def smallest_period(s: str) -> int:
    """Length of the smallest p with s[i] == s[i+p] for all i (failure function)."""
    n = len(s)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and s[i] != s[k]:
            k = fail[k - 1]
        if s[i] == s[k]:
            k += 1
        fail[i] = k
    return n - fail[n - 1] if n else 0


def _factorize(n: int, effort: int = 200000) -> dict[int, int]:
    fac: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
    d = 7
    steps = 0
    while d * d <= n and steps < effort:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 2
        steps += 1
    if n == 1:
        return fac

    def rho(m):
        if _probably_prime(m):
            return m
        rng = random.Random(m)
        while True:
            c = rng.randrange(1, m)
            x = y = rng.randrange(2, m)
            d = 1
            while d == 1:
                x = (x * x + c) % m
                y = (y * y + c) % m
                y = (y * y + c) % m
                d = _gcd(abs(x - y), m)
            if d != m:
                return d

    pending = [n]
    while pending:
        m = pending.pop()
        if m == 1:
            continue
        if _probably_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        d = rho(m)
        pending.append(d)
        pending.append(m // d)
    return fac


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int, limit: int = 4096) -> list[int]:
    fac = _factorize(n)
    divs = [1]
    for p, e in fac.items():
        divs = [d * p ** i for d in divs for i in range(e + 1)]
        if len(divs) > limit:
            raise CapExceeded(n, limit)
    return sorted(divs)


def primitive_root(w: WordRef, cap: int = DEFAULT_EXPAND_CAP) -> WordRef:
    """The primitive word p with w == p**k (w itself if not a proper power).

    Under the cap the word is expanded and the failure function gives the
    answer exactly.  Above the cap, candidate root lengths are the divisors
    of the length, each checked by one compressed overlap comparison
    (w equals its own d-shift iff d is a period); this covers the huge
    structured words that occur in practice and raises CapExceeded when the
    length cannot be factored into a reasonable divisor list.
    """
    n = w.length
    if n == 0:
        return w
    if n <= cap:
        s = expand(w, cap)
        p = smallest_period(s)
        if n % p == 0:
            return prefix(w, p)
        return w
    for d in _divisors(n):
        if d == n:
            return w
        if n % d:
            continue
        if equals(strip_suffix(w, d), strip_prefix(w, d)):
            return prefix(w, d)
    return w
