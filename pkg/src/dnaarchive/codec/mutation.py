"""Synthesis/sequencing error injection for robustness tests.

Substitutions are classified the usual way: transitions swap within purines
(A<->G) or within pyrimidines (C<->T); transversions swap a purine for a
pyrimidine or the reverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASES = "ACGT"
TRANSITION = {"A": "G", "G": "A", "C": "T", "T": "C"}
TRANSVERSIONS = {"A": "CT", "G": "CT", "C": "AG", "T": "AG"}


@dataclass(frozen=True)
class Mutation:
    position: int  # index in the input sequence
    kind: str  # insertion | deletion | transition | transversion
    base: str = ""  # new base, empty for deletions


def is_transition(a: str, b: str) -> bool:
    return TRANSITION[a] == b


def mutate(
    seq: str,
    insertion: float = 0.0,
    deletion: float = 0.0,
    substitution: float = 0.0,
    rng: np.random.Generator | None = None,
    transition_fraction: float = 0.5,
) -> tuple[str, list[Mutation]]:
    """Apply independent per-position errors and report each one.

    At every input position the base is deleted with probability
    ``deletion``; otherwise it is substituted with probability
    ``substitution`` (a transition with probability ``transition_fraction``).
    Independently, a uniformly random base is inserted after it with
    probability ``insertion``.
    """
    for name, rate in (("insertion", insertion), ("deletion", deletion),
                       ("substitution", substitution), ("transition_fraction", transition_fraction)):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {rate}")
    rng = np.random.default_rng() if rng is None else rng
    n = len(seq)
    u_del, u_sub, u_kind, u_ins = rng.random((4, n))
    pick = rng.integers(0, 4, size=(2, n))

    out: list[str] = []
    events: list[Mutation] = []
    for i, base in enumerate(seq):
        if u_del[i] < deletion:
            events.append(Mutation(i, "deletion"))
        elif u_sub[i] < substitution:
            if u_kind[i] < transition_fraction:
                new, kind = TRANSITION[base], "transition"
            else:
                new, kind = TRANSVERSIONS[base][pick[0, i] % 2], "transversion"
            out.append(new)
            events.append(Mutation(i, kind, new))
        else:
            out.append(base)
        if u_ins[i] < insertion:
            new = BASES[pick[1, i]]
            out.append(new)
            events.append(Mutation(i, "insertion", new))
    return "".join(out), events


def inject_errors(
    seq: str,
    rates: dict[str, float],
    rng: np.random.Generator,
    transition_fraction: float = 0.5,
) -> str:
    """``mutate`` with rates given as a mapping, returning only the sequence."""
    unknown = set(rates) - {"insertion", "deletion", "substitution"}
    if unknown:
        raise ValueError(f"unknown error kinds: {sorted(unknown)}")
    return mutate(seq, rng=rng, transition_fraction=transition_fraction, **rates)[0]
