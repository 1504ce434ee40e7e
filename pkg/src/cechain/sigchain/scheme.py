"""Signature schemes producing 160-bit tags.

The protocol only needs *some* public-key scheme whose signatures fit the
preamble budget. The default here is a deterministic Schnorr signature in a
prime-order subgroup with an 80-bit challenge and an 80-bit response, so a
signature is exactly 160 bits and verification needs only the public key.
The group is small by modern standards; it stands in for a pairing-based
short signature and is not meant to be secure.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field
from typing import Protocol

from .. import bits as _bits

SIGNATURE_BITS = 160

# 80-bit prime subgroup order, 512-bit modulus with Q | P - 1, generator of order Q.
Q = 0x80008E35C2CD3BF664BF
P = int(
    "8000000000000000000000000000000000000000000000000000000000000000"
    "000000000000000000000000000000000000000002187b5570a383124cfc56a3",
    16,
)
G = int(
    "278b6c06cbc65837a1bc58277eb64913d272a12f41faafb9867d2a391976cb1d"
    "7aee77594aa181203ffc0363119ba691ec81c65a19ffa4b3a0e9399df6f38ea",
    16,
)
_HALF = SIGNATURE_BITS // 2
_PBYTES = (P.bit_length() + 7) // 8


class MissingKeyError(ValueError):
    pass


class SignatureScheme(Protocol):
    def keygen(self, seed: bytes) -> tuple[bytes, bytes]: ...

    def sign(self, message: str, private_key: bytes) -> str: ...

    def verify(self, message: str, signature: str, public_key: bytes) -> bool: ...


def _challenge(r: int, message: str) -> int:
    digest = hashlib.sha256(r.to_bytes(_PBYTES, "big") + _bits.to_bytes(message)).digest()
    return int.from_bytes(digest, "big") >> (256 - _HALF)


class SchnorrScheme:
    name = "schnorr-80"

    def keygen(self, seed: bytes) -> tuple[bytes, bytes]:
        x = int.from_bytes(hashlib.sha256(b"keygen" + seed).digest(), "big") % (Q - 1) + 1
        y = pow(G, x, P)
        return y.to_bytes(_PBYTES, "big"), x.to_bytes(10, "big")

    def sign(self, message: str, private_key: bytes) -> str:
        if not private_key:
            raise MissingKeyError("private key required to sign")
        x = int.from_bytes(private_key, "big")
        # deterministic nonce, RFC 6979 in spirit
        nonce = hmac.new(private_key, _bits.to_bytes(message) + len(message).to_bytes(2, "big"),
                         hashlib.sha256).digest()
        k = int.from_bytes(nonce, "big") % (Q - 1) + 1
        e = _challenge(pow(G, k, P), message)
        s = (k - x * e) % Q
        return _bits.from_int(e, _HALF) + _bits.from_int(s, _HALF)

    def verify(self, message: str, signature: str, public_key: bytes) -> bool:
        if len(signature) != SIGNATURE_BITS:
            raise ValueError(f"signature must be {SIGNATURE_BITS} bits, got {len(signature)}")
        e = _bits.to_int(signature[:_HALF])
        s = _bits.to_int(signature[_HALF:])
        if s >= Q:
            return False
        y = int.from_bytes(public_key, "big")
        r = pow(G, s, P) * pow(y, e, P) % P
        return hmac.compare_digest(_bits.from_int(_challenge(r, message), _HALF), signature[:_HALF])


DEFAULT_SCHEME = SchnorrScheme()


@dataclass(frozen=True)
class KeyMaterial:
    """Keys held by one AP-station pairing.

    ``private_key`` is excluded from ``repr`` and from :meth:`to_report`.
    """

    public_key: bytes
    private_key: bytes = field(repr=False)
    ptk: bytes = field(repr=False)
    pmk: bytes = field(repr=False)

    def __post_init__(self):
        if len(self.ptk) < 16:
            raise ValueError("ptk must be at least 16 bytes")

    @classmethod
    def generate(cls, seed: bytes | int, scheme: SignatureScheme = DEFAULT_SCHEME) -> "KeyMaterial":
        if isinstance(seed, int):
            seed = seed.to_bytes(8, "big")
        public, private = scheme.keygen(seed)
        ptk = hashlib.sha256(b"ptk" + seed).digest()[:16]
        pmk = hashlib.sha256(b"pmk" + seed).digest()
        return cls(public, private, ptk, pmk)

    def public_only(self) -> "KeyMaterial":
        """The station's view: public key and session keys, no signing key."""
        return KeyMaterial(self.public_key, b"", self.ptk, self.pmk)

    def to_report(self) -> dict:
        return {"public_key": self.public_key.hex()}


def sign(message: str, key: KeyMaterial, scheme: SignatureScheme = DEFAULT_SCHEME) -> str:
    if len(message) != 112:
        raise ValueError("message must be 112 bits")
    return scheme.sign(message, key.private_key)


def verify_sig(message: str, signature: str, public_key: bytes,
               scheme: SignatureScheme = DEFAULT_SCHEME) -> bool:
    return scheme.verify(message, signature, public_key)
