"""Shared helpers for driving honest signing runs in tests."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from trustd.cosig import (
    Roster,
    aggregate_commitments,
    aggregate_responses,
    assemble_signature,
    parse_signature,
    participant_response,
)
from trustd.groups import Keypair, hash_challenge


def honest_collective_sign(group, privates, subset, msg, f=None, dids=None):
    """Run the two-round signing flow by hand for the given present subset.

    ``privates`` fixes the long-term keys, ``subset`` the present roster
    indices.  Nonces are derived deterministically from the index so runs
    are reproducible.  Returns (signature, roster).
    """
    keypairs = [Keypair.from_private(group, a) for a in privates]
    if dids is None:
        dids = [f"did:trustd:member{i}" for i in range(len(privates))]
    roster = Roster.of((dids[i], keypairs[i].public) for i in range(len(privates)))

    nonces = {i: (2 + 3 * i) % (group.order - 2) + 2 for i in subset}
    commitments = [(i, group.base_mult(nonces[i])) for i in sorted(subset)]
    R, Z = aggregate_commitments(commitments, roster)
    c = hash_challenge(R, roster.aggregate_key(), msg, f)
    responses = [participant_response(keypairs[i], nonces[i], c) for i in sorted(subset)]
    s = aggregate_responses(responses, group)
    sig = parse_signature(assemble_signature(R, s, Z), roster.n, group)
    return sig, roster
