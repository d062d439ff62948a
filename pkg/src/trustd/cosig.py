"""Schnorr signatures, collective-signature assembly, and verification.

A collective signature over a roster of n appraisers is the triple
(R, s, Z): the aggregate commitment, the aggregate response, and a
participation bitmask with one bit per roster position (bit set = that
signer is absent).  The serialized form is exactly
``encode(R) || encode(s) || Z`` = 32 + 32 + ceil(n/8) bytes.

Two sign conventions coexist deliberately: the single-party signature uses
s = k - e*d with check [s]B + [e]Q == R, while the collective response is
s_i = r_i + c*a_i with check [s]B == R + [c]*sum(present keys).

Known limitation, by design: there are no rogue-key defenses (no
key-prefixed challenges, no proofs of possession).  Rosters are expected
to come from a directory the verifier already trusts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .groups import (
    ChallengeFn,
    DecodeError,
    Group,
    GroupElement,
    aggregate_keys,
    decode_scalar,
    encode_scalar,
    hash_challenge,
    Keypair,
)

__all__ = [
    "Roster",
    "Bitmask",
    "SchnorrSignature",
    "CollectiveSignature",
    "AcceptancePolicy",
    "VerifyReport",
    "SignatureFormatError",
    "schnorr_sign",
    "schnorr_verify",
    "aggregate_commitments",
    "participant_response",
    "aggregate_responses",
    "assemble_signature",
    "parse_signature",
    "verify_collective",
]


class SignatureFormatError(ValueError):
    """Raised when signature bytes cannot be parsed canonically."""


@dataclass(frozen=True)
class Roster:
    """Ordered list of (did, public key); positions define bitmask indices."""

    entries: tuple[tuple[str, GroupElement], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("roster must have at least one member")
        dids = [did for did, _ in self.entries]
        if len(set(dids)) != len(dids):
            raise ValueError("roster contains duplicate DIDs")

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, GroupElement]]) -> "Roster":
        return cls(tuple((did, pub) for did, pub in pairs))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def group(self) -> Group:
        return self.entries[0][1].group

    @property
    def dids(self) -> tuple[str, ...]:
        return tuple(did for did, _ in self.entries)

    def pubkey(self, index: int) -> GroupElement:
        return self.entries[index][1]

    def did(self, index: int) -> str:
        return self.entries[index][0]

    def index_of(self, did: str) -> int:
        for i, (d, _) in enumerate(self.entries):
            if d == did:
                return i
        raise KeyError(did)

    def aggregate_key(self) -> GroupElement:
        return aggregate_keys([pub for _, pub in self.entries])


class Bitmask:
    """Absence flags, one bit per roster position, LSB-first within bytes.

    Bit i lives in byte i//8 at bit position i%8; a set bit means the
    signer at that roster position did NOT contribute.  Bits at positions
    >= n are padding and must stay zero.
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: bytes):
        if n < 1:
            raise ValueError("bitmask needs n >= 1")
        if len(bits) != (n + 7) // 8:
            raise ValueError(f"bitmask for n={n} needs {(n + 7) // 8} bytes")
        self.n = n
        self.bits = bytes(bits)

    @classmethod
    def from_absent(cls, n: int, absent: Iterable[int]) -> "Bitmask":
        buf = bytearray((n + 7) // 8)
        for i in absent:
            if not 0 <= i < n:
                raise ValueError(f"index {i} out of range for n={n}")
            buf[i // 8] |= 1 << (i % 8)
        return cls(n, bytes(buf))

    @classmethod
    def parse(cls, n: int, raw: bytes) -> "Bitmask":
        """Validating constructor: length must match and padding be zero."""
        mask = cls(n, raw)
        if any(i >= n for i in mask.absent_indices()):
            raise SignatureFormatError("nonzero padding bits in bitmask")
        return mask

    def is_absent(self, i: int) -> bool:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return bool(self.bits[i // 8] >> (i % 8) & 1)

    def absent_indices(self) -> tuple[int, ...]:
        out = []
        for byte_index, byte in enumerate(self.bits):
            while byte:
                low = byte & -byte
                out.append(byte_index * 8 + low.bit_length() - 1)
                byte ^= low
        return tuple(out)

    def present_indices(self) -> tuple[int, ...]:
        absent = set(self.absent_indices())
        return tuple(i for i in range(self.n) if i not in absent)

    def popcount(self) -> int:
        return sum(bin(b).count("1") for b in self.bits)

    def __eq__(self, other):
        return (
            isinstance(other, Bitmask) and other.n == self.n and other.bits == self.bits
        )

    def __hash__(self):
        return hash((self.n, self.bits))

    def __repr__(self):
        return f"Bitmask(n={self.n}, bits={self.bits.hex()})"


@dataclass(frozen=True)
class SchnorrSignature:
    """Single-party signature (s, e)."""

    s: int
    e: int


@dataclass(frozen=True)
class CollectiveSignature:
    """Aggregate commitment R, aggregate response s, participation mask Z."""

    R: GroupElement
    s: int
    Z: Bitmask

    def to_bytes(self) -> bytes:
        return assemble_signature(self.R, self.s, self.Z)


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of collective verification."""

    valid: bool
    present: tuple[int, ...]
    challenge: int
    reason: Optional[str] = None


class AcceptancePolicy:
    """Verifier-side rule on which participation bitmasks are acceptable."""

    def __init__(self, check: Callable[[Bitmask], bool], description: str):
        self._check = check
        self.description = description

    @classmethod
    def threshold(cls, t: int) -> "AcceptancePolicy":
        """Accept when at least t roster members are present (t <= n)."""
        if t < 1:
            raise ValueError("threshold must be >= 1")

        def check(mask: Bitmask) -> bool:
            if t > mask.n:
                raise ValueError(f"threshold {t} exceeds roster size {mask.n}")
            return mask.n - mask.popcount() >= t

        return cls(check, f"threshold({t})")

    @classmethod
    def any_present(cls) -> "AcceptancePolicy":
        return cls.threshold(1)

    @classmethod
    def predicate(
        cls, fn: Callable[[Bitmask], bool], description: str = "predicate"
    ) -> "AcceptancePolicy":
        """Arbitrary bitmask predicate, for policies beyond t-of-n."""
        return cls(fn, description)

    def accepts(self, mask: Bitmask) -> bool:
        return bool(self._check(mask))

    def __repr__(self):
        return f"AcceptancePolicy({self.description})"


# -- single-party Schnorr ------------------------------------------------------

def schnorr_sign(
    kp: Keypair, msg: bytes, k: int, f: Optional[ChallengeFn] = None
) -> SchnorrSignature:
    """Sign with nonce k: R = [k]B, e = H(R || M), s = k - e*d mod L."""
    group = kp.group
    if k % group.order in (0, 1):
        raise ValueError("nonce must not be 0 or 1 mod L")
    R = group.base_mult(k)
    e = hash_challenge(R, None, msg, f)
    s = (k - e * kp.private) % group.order
    return SchnorrSignature(s, e)


def schnorr_verify(
    pub: GroupElement, msg: bytes, sig: SchnorrSignature, f: Optional[ChallengeFn] = None
) -> bool:
    """Check e == H([s]B + [e]Q || M); False on any malformed input."""
    try:
        group = pub.group
        if not (0 <= sig.s < group.order and 0 <= sig.e < group.order):
            return False
        r_v = group.base_mult(sig.s) + group.scalar_mult(sig.e, pub)
        e_v = hash_challenge(r_v, None, msg, f)
        return e_v == sig.e
    except Exception:
        return False


# -- collective signing pieces ---------------------------------------------------

def aggregate_commitments(
    commitments: Sequence[tuple[int, GroupElement]], roster: Roster
) -> tuple[GroupElement, Bitmask]:
    """Sum received commitments and mark every silent roster index in Z."""
    if not commitments:
        raise ValueError("no commitments to aggregate (no present signer)")
    seen: set[int] = set()
    for index, _ in commitments:
        if not 0 <= index < roster.n:
            raise ValueError(f"commitment index {index} out of range")
        if index in seen:
            raise ValueError(f"duplicate commitment for index {index}")
        seen.add(index)
    acc = commitments[0][1]
    for _, element in commitments[1:]:
        acc = acc + element
    mask = Bitmask.from_absent(roster.n, set(range(roster.n)) - seen)
    return acc, mask


def participant_response(kp: Keypair, r_i: int, c: int) -> int:
    """One signer's response s_i = (r_i + c * a_i) mod L."""
    return (r_i + c * kp.private) % kp.group.order


def aggregate_responses(responses: Sequence[int], group: Group) -> int:
    """Sum of partial responses mod L."""
    return sum(responses) % group.order


def assemble_signature(R: GroupElement, s: int, Z: Bitmask) -> bytes:
    """encode(R) || encode(s) || Z, exactly 64 + ceil(n/8) bytes."""
    return R.encode() + encode_scalar(s) + Z.bits


def parse_signature(data: bytes, n: int, group: Group) -> CollectiveSignature:
    """Exact inverse of :func:`assemble_signature`; strictly canonical.

    Rejects wrong lengths, non-canonical scalars, undecodable points, and
    nonzero bitmask padding.
    """
    mask_len = (n + 7) // 8
    if len(data) != 64 + mask_len:
        raise SignatureFormatError(
            f"signature for n={n} must be {64 + mask_len} bytes, got {len(data)}"
        )
    try:
        R = group.decode(data[:32])
        s = decode_scalar(data[32:64], group.order)
    except DecodeError as exc:
        raise SignatureFormatError(str(exc)) from exc
    Z = Bitmask.parse(n, data[64:])
    return CollectiveSignature(R, s, Z)


def verify_collective(
    sig: CollectiveSignature,
    msg: bytes,
    roster: Roster,
    policy: AcceptancePolicy,
    f: Optional[ChallengeFn] = None,
) -> VerifyReport:
    """Verify (R, s, Z) against a roster under an acceptance policy.

    The challenge binds the aggregate key of the FULL roster; the
    verification equation [s]B == R + [c] * sum(present keys) uses only the
    signers Z marks as present.
    """
    group = roster.group
    if sig.Z.n != roster.n:
        return VerifyReport(False, (), 0, reason="bitmask size does not match roster")
    present = sig.Z.present_indices()
    a_full = roster.aggregate_key()
    c = hash_challenge(sig.R, a_full, msg, f)
    if not present:
        return VerifyReport(False, present, c, reason="no present signers")
    if not policy.accepts(sig.Z):
        return VerifyReport(False, present, c, reason="policy rejected bitmask")
    a_present = aggregate_keys([roster.pubkey(i) for i in present])
    lhs = group.base_mult(sig.s)
    rhs = sig.R + group.scalar_mult(c, a_present)
    if lhs != rhs:
        return VerifyReport(False, present, c, reason="verification equation failed")
    return VerifyReport(True, present, c)
