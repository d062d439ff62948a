"""Prime-order group backends for collective signing.

Two interchangeable backends expose the same abstract surface: a generator
``B`` of prime order ``L``, scalar arithmetic mod ``L``, 32-byte point
encodings, and the SHA-512 collective challenge.

* :class:`TinyGroup` — the quadratic-residue subgroup of Z*_2039 with
  generator 4 and order 1019.  Small enough that discrete logs can be found
  by exhaustive search, which makes it the designated backend for oracle
  tests; structurally identical to the production group.
* :class:`Ed25519Group` — the twisted Edwards curve group used by EdDSA
  (RFC 8032 parameters), implemented in pure Python with extended
  coordinates and a precomputed table for base-point multiplication.

Scalars are plain Python ints, always reduced into [0, L).  Constant-time
hardening and side-channel resistance are explicitly out of scope.
"""

from __future__ import annotations

import hashlib
import random
import secrets
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

__all__ = [
    "GroupError",
    "DecodeError",
    "GroupElement",
    "Group",
    "TinyGroup",
    "Ed25519Group",
    "TINY",
    "ED25519",
    "get_group",
    "Keypair",
    "keygen",
    "nonce_generate",
    "aggregate_keys",
    "ChallengeFn",
    "sha512_challenge_fn",
    "hash_challenge",
    "encode_scalar",
    "decode_scalar",
    "save_keypair",
    "load_keypair",
]


class GroupError(Exception):
    """Base error for group arithmetic and encoding failures."""


class DecodeError(GroupError):
    """Raised when bytes do not decode to a valid group element or scalar."""


class GroupElement:
    """An element of the order-L subgroup, bound to its backend.

    Instances are immutable value objects; ``+`` is the group operation.
    Construction goes through a :class:`Group` (decode, base_mult, ...)
    which guarantees subgroup membership.
    """

    __slots__ = ("group", "value")

    def __init__(self, group: "Group", value: object):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, val):  # pragma: no cover - guard only
        raise AttributeError("GroupElement is immutable")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement) or other.group is not self.group:
            return NotImplemented
        return GroupElement(self.group, self.group._add_raw(self.value, other.value))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement) or other.group is not self.group:
            return NotImplemented if not isinstance(other, GroupElement) else False
        return self.group._eq_raw(self.value, other.value)

    def __hash__(self) -> int:
        return hash((id(self.group), self.encode()))

    def encode(self) -> bytes:
        """Canonical 32-byte encoding of this element."""
        return self.group._encode_raw(self.value)

    def __repr__(self) -> str:
        return f"GroupElement({self.group.name}, {self.encode().hex()})"


class Group:
    """Abstract prime-order cyclic group.

    Subclasses provide raw-value arithmetic; this base class wraps raw
    values in :class:`GroupElement` and implements the generic operations
    (scalar sampling, encode/decode plumbing).
    """

    name: str = "abstract"
    order: int = 0
    element_encoding_len: int = 32

    # -- backend hooks on raw values -------------------------------------

    def _add_raw(self, a, b):
        raise NotImplementedError

    def _mult_raw(self, k: int, p):
        raise NotImplementedError

    def _base_mult_raw(self, k: int):
        raise NotImplementedError

    def _encode_raw(self, p) -> bytes:
        raise NotImplementedError

    def _decode_raw(self, data: bytes):
        raise NotImplementedError

    def _eq_raw(self, a, b) -> bool:
        raise NotImplementedError

    def _identity_raw(self):
        raise NotImplementedError

    # -- public surface ---------------------------------------------------

    @property
    def generator(self) -> GroupElement:
        return self.base_mult(1)

    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity_raw())

    def base_mult(self, k: int) -> GroupElement:
        """[k]B for the group generator B."""
        return GroupElement(self, self._base_mult_raw(k % self.order))

    def scalar_mult(self, k: int, p: GroupElement) -> GroupElement:
        """[k]P for an arbitrary element P."""
        if p.group is not self:
            raise GroupError("element belongs to a different group")
        return GroupElement(self, self._mult_raw(k % self.order, p.value))

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return a + b

    def sum(self, elements: Iterable[GroupElement]) -> GroupElement:
        acc = self.identity()
        for e in elements:
            acc = acc + e
        return acc

    def encode(self, p: GroupElement) -> bytes:
        return p.encode()

    def decode(self, data: bytes) -> GroupElement:
        """Decode 32 bytes into a subgroup member.

        Rejects wrong lengths, non-canonical encodings, and any point that
        is not in the order-L subgroup.
        """
        if len(data) != self.element_encoding_len:
            raise DecodeError(
                f"expected {self.element_encoding_len} bytes, got {len(data)}"
            )
        return GroupElement(self, self._decode_raw(data))

    def random_scalar(self, rng: Optional[random.Random] = None) -> int:
        """Uniform scalar in [1, L); never returns 0."""
        while True:
            raw = rng.randbytes(32) if rng is not None else secrets.token_bytes(32)
            k = int.from_bytes(raw, "little") % self.order
            if k != 0:
                return k

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name} order={self.order}>"


class TinyGroup(Group):
    """Quadratic residues of Z*_2039: generator 4, prime order 1019.

    2039 and 1019 are prime and 2039 = 2*1019 + 1, so the squares of
    Z*_2039 form a subgroup of order 1019 generated by 4 = 2^2.  Elements
    are stored as ints; encoding is the 32-byte little-endian integer.
    """

    name = "tiny"
    modulus = 2039
    order = 1019
    gen = 4

    def _add_raw(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def _mult_raw(self, k: int, p: int) -> int:
        return pow(p, k, self.modulus)

    def _base_mult_raw(self, k: int) -> int:
        return pow(self.gen, k, self.modulus)

    def _encode_raw(self, p: int) -> bytes:
        return p.to_bytes(32, "little")

    def _decode_raw(self, data: bytes) -> int:
        v = int.from_bytes(data, "little")
        if not 1 <= v < self.modulus:
            raise DecodeError(f"value {v} outside [1, {self.modulus})")
        if pow(v, self.order, self.modulus) != 1:
            raise DecodeError(f"value {v} is not in the order-{self.order} subgroup")
        return v

    def _eq_raw(self, a: int, b: int) -> bool:
        return a == b

    def _identity_raw(self) -> int:
        return 1

    def dlog(self, p: GroupElement) -> int:
        """Exhaustive discrete log (test oracle); O(order)."""
        acc = 1
        for k in range(self.order):
            if acc == p.value:
                return k
            acc = (acc * self.gen) % self.modulus
        raise GroupError("element not generated by the base point")


# Ed25519 field/curve constants (RFC 8032).
_P = 2**255 - 19
_L = 2**252 + 27742317777372353535851937790883648493
_D = (-121665 * pow(121666, _P - 2, _P)) % _P

_By = (4 * pow(5, _P - 2, _P)) % _P
_Bx_sq = ((_By * _By - 1) * pow(_D * _By * _By + 1, _P - 2, _P)) % _P
_Bx = pow(_Bx_sq, (_P + 3) // 8, _P)
if (_Bx * _Bx - _Bx_sq) % _P != 0:
    _Bx = (_Bx * pow(2, (_P - 1) // 4, _P)) % _P
if _Bx & 1:
    _Bx = _P - _Bx

# Extended coordinates (X, Y, Z, T): x = X/Z, y = Y/Z, T = XY/Z.
_B_EXT = (_Bx, _By, 1, (_Bx * _By) % _P)
_ZERO_EXT = (0, 1, 1, 0)


def _ed_add(p, q):
    x1, y1, z1, t1 = p
    x2, y2, z2, t2 = q
    a = (y1 - x1) * (y2 - x2) % _P
    b = (y1 + x1) * (y2 + x2) % _P
    c = 2 * t1 * t2 * _D % _P
    d = 2 * z1 * z2 % _P
    e, f, g, h = (b - a) % _P, (d - c) % _P, (d + c) % _P, (b + a) % _P
    return (e * f % _P, g * h % _P, f * g % _P, e * h % _P)


def _ed_double(p):
    x1, y1, z1, _ = p
    a = x1 * x1 % _P
    b = y1 * y1 % _P
    c = 2 * z1 * z1 % _P
    h = (a + b) % _P
    e = (h - (x1 + y1) * (x1 + y1)) % _P
    g = (a - b) % _P
    f = (c + g) % _P
    return (e * f % _P, g * h % _P, f * g % _P, e * h % _P)


class Ed25519Group(Group):
    """The prime-order subgroup of the Ed25519 curve (RFC 8032 parameters).

    Encoding is the standard 32-byte compressed form: little-endian y with
    the sign of x in the top bit.  ``decode`` enforces canonical y < p,
    curve membership, and order-L subgroup membership.
    """

    name = "ed25519"
    order = _L

    def __init__(self):
        # powers-of-two table for fast base multiplication
        table = [_B_EXT]
        p = _B_EXT
        for _ in range(252):
            p = _ed_double(p)
            table.append(p)
        self._base_table = table

    def _add_raw(self, a, b):
        return _ed_add(a, b)

    def _mult_raw(self, k: int, p):
        r = _ZERO_EXT
        q = p
        while k:
            if k & 1:
                r = _ed_add(r, q)
            q = _ed_double(q)
            k >>= 1
        return r

    def _base_mult_raw(self, k: int):
        r = _ZERO_EXT
        i = 0
        while k:
            if k & 1:
                r = _ed_add(r, self._base_table[i])
            k >>= 1
            i += 1
        return r

    def _to_affine(self, p):
        x, y, z, _ = p
        zi = pow(z, _P - 2, _P)
        return (x * zi % _P, y * zi % _P)

    def _encode_raw(self, p) -> bytes:
        x, y = self._to_affine(p)
        out = bytearray(y.to_bytes(32, "little"))
        out[31] |= (x & 1) << 7
        return bytes(out)

    def _decode_raw(self, data: bytes):
        raw = bytearray(data)
        sign = raw[31] >> 7
        raw[31] &= 0x7F
        y = int.from_bytes(bytes(raw), "little")
        if y >= _P:
            raise DecodeError("non-canonical y coordinate")
        y_sq = y * y % _P
        denom = (_D * y_sq + 1) % _P
        x_sq = (y_sq - 1) * pow(denom, _P - 2, _P) % _P
        x = pow(x_sq, (_P + 3) // 8, _P)
        if (x * x - x_sq) % _P != 0:
            x = x * pow(2, (_P - 1) // 4, _P) % _P
            if (x * x - x_sq) % _P != 0:
                raise DecodeError("not a curve point")
        if x == 0 and sign:
            raise DecodeError("non-canonical sign for x = 0")
        if x & 1 != sign:
            x = _P - x
        p = (x, y, 1, x * y % _P)
        # reject anything outside the order-L subgroup (small/mixed order)
        if not self._eq_raw(self._mult_raw(_L, p), _ZERO_EXT):
            raise DecodeError("point is not in the prime-order subgroup")
        return p

    def _eq_raw(self, a, b) -> bool:
        # X1/Z1 == X2/Z2 and Y1/Z1 == Y2/Z2, avoiding inversions
        x1, y1, z1, _ = a
        x2, y2, z2, _ = b
        return (x1 * z2 - x2 * z1) % _P == 0 and (y1 * z2 - y2 * z1) % _P == 0

    def _identity_raw(self):
        return _ZERO_EXT


TINY = TinyGroup()
ED25519 = Ed25519Group()

_BACKENDS = {"tiny": TINY, "ed25519": ED25519}


def get_group(name: str) -> Group:
    """Look up a backend by name ("tiny" or "ed25519")."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise GroupError(f"unknown group backend {name!r}") from None


@dataclass(frozen=True)
class Keypair:
    """Long-term signing keypair: private scalar a, public A = [a]B."""

    group: Group
    private: int
    public: GroupElement

    def __post_init__(self):
        if not 1 <= self.private < self.group.order:
            raise GroupError("private scalar must be in [1, L)")

    @classmethod
    def from_private(cls, group: Group, a: int) -> "Keypair":
        """Build the keypair for a chosen private scalar (test seam)."""
        return cls(group, a, group.base_mult(a))


def keygen(group: Group, rng_seed: Optional[bytes] = None) -> Keypair:
    """Generate a keypair; a is uniform in [1, L).

    With ``rng_seed`` set, the private scalar is derived deterministically
    by SHA-512 counter hashing of the seed (reduced mod L, zero skipped).
    """
    if rng_seed is None:
        a = group.random_scalar()
    else:
        counter = 0
        while True:
            digest = hashlib.sha512(rng_seed + counter.to_bytes(4, "little")).digest()
            a = int.from_bytes(digest, "little") % group.order
            if a != 0:
                break
            counter += 1
    return Keypair(group, a, group.base_mult(a))


def nonce_generate(
    group: Group,
    rng: Optional[random.Random] = None,
    draw: Optional[Callable[[], int]] = None,
) -> tuple[int, GroupElement]:
    """Draw a one-time commitment secret r with r mod L not in {0, 1}.

    Each candidate is SHA-512 of 32 bytes of fresh randomness, reduced mod
    L; candidates equal to 0 or 1 are rejected and redrawn.  ``draw`` is an
    injectable candidate source for tests.
    """
    if draw is None:
        def draw() -> int:
            raw = rng.randbytes(32) if rng is not None else secrets.token_bytes(32)
            return int.from_bytes(hashlib.sha512(raw).digest(), "little") % group.order

    while True:
        r = draw() % group.order
        if r not in (0, 1):
            return r, group.base_mult(r)


def aggregate_keys(pubkeys: Sequence[GroupElement]) -> GroupElement:
    """Group sum of public keys; the aggregate verification key."""
    if not pubkeys:
        raise ValueError("cannot aggregate an empty key list")
    acc = pubkeys[0]
    for p in pubkeys[1:]:
        acc = acc + p
    return acc


# Challenge function seam: (R_bytes, A_bytes, msg_bytes) -> scalar.
ChallengeFn = Callable[[bytes, bytes, bytes], int]


def sha512_challenge_fn(order: int) -> ChallengeFn:
    """The default challenge: SHA-512(R || A || M), little-endian, mod L."""

    def challenge(r_bytes: bytes, a_bytes: bytes, msg: bytes) -> int:
        digest = hashlib.sha512(r_bytes + a_bytes + msg).digest()
        return int.from_bytes(digest, "little") % order

    return challenge


def hash_challenge(
    R: GroupElement,
    A: Optional[GroupElement],
    msg: bytes,
    f: Optional[ChallengeFn] = None,
) -> int:
    """Challenge scalar binding commitment, aggregate key, and message.

    ``A`` may be None for the single-signer variant, which omits the
    aggregate key from the hash input.  The result is always reduced into
    [0, L) regardless of what ``f`` returns.
    """
    group = R.group
    if f is None:
        f = sha512_challenge_fn(group.order)
    a_bytes = A.encode() if A is not None else b""
    return f(R.encode(), a_bytes, msg) % group.order


def encode_scalar(s: int) -> bytes:
    """32-byte little-endian scalar encoding."""
    if s < 0:
        raise ValueError("scalar must be non-negative")
    return s.to_bytes(32, "little")


def decode_scalar(data: bytes, order: int) -> int:
    """Parse a canonical 32-byte little-endian scalar; rejects s >= L."""
    if len(data) != 32:
        raise DecodeError(f"expected 32 scalar bytes, got {len(data)}")
    s = int.from_bytes(data, "little")
    if s >= order:
        raise DecodeError("non-canonical scalar (>= group order)")
    return s


def save_keypair(path: str | Path, kp: Keypair) -> None:
    """Write a key file: line 1 private scalar hex, line 2 public element hex."""
    text = encode_scalar(kp.private).hex() + "\n" + kp.public.encode().hex() + "\n"
    Path(path).write_text(text, encoding="ascii")


def load_keypair(path: str | Path, group: Group) -> Keypair:
    """Read a key file written by :func:`save_keypair`; checks A = [a]B."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if len(lines) < 2:
        raise DecodeError(f"key file {path} must have two lines")
    private = decode_scalar(bytes.fromhex(lines[0].strip()), group.order)
    public = group.decode(bytes.fromhex(lines[1].strip()))
    kp = Keypair(group, private, public)
    if group.base_mult(private) != public:
        raise DecodeError(f"key file {path}: public key does not match private scalar")
    return kp
