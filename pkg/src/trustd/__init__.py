"""Collective content attestation toolkit.

Content creators gather multi-party Schnorr signatures over content from
chosen appraisers, anchor the attestations in an append-only hash-chained
ledger, and readers score content credibility from their own trust
assignments.
"""

__version__ = "0.1.0"

from .groups import (  # noqa: F401
    ED25519,
    TINY,
    DecodeError,
    Group,
    GroupElement,
    GroupError,
    Keypair,
    aggregate_keys,
    get_group,
    hash_challenge,
    keygen,
    nonce_generate,
)
