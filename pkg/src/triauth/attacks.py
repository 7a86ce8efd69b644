"""Adversary model and the three attacks the protocol is vulnerable to.

The channel adversary sees every login-phase message and may drop, modify,
or inject its own.  A card thief additionally learns everything stored on a
stolen card, but not the password typed by its owner.  Neither capability
includes the control server's master secrets.
"""

from dataclasses import dataclass, field

from .actors import M1, CardSession, SmartCard
from .crypto import BlockRng, h, random_block, xor


@dataclass(frozen=True)
class ExtractedSecrets:
    """Byte-exact copy of everything stored on a stolen card."""

    c_i: bytes
    d_i: bytes
    e_i: bytes
    h_y: bytes
    b: bytes


def extract_card(card: SmartCard) -> ExtractedSecrets:
    """Read out a card's stored values (the physical-extraction capability)."""
    return ExtractedSecrets(c_i=card.c_i, d_i=card.d_i, e_i=card.e_i, h_y=card.h_y, b=card.b)


@dataclass(frozen=True)
class Dictionary:
    """Finite, ordered list of (identity, password) candidate pairs."""

    entries: tuple[tuple[bytes, bytes], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "Dictionary":
        """Build from (id, password) pairs; str values are encoded as UTF-8."""
        encoded = []
        for ident, password in pairs:
            if isinstance(ident, str):
                ident = ident.encode("utf-8")
            if isinstance(password, str):
                password = password.encode("utf-8")
            if not ident or not password:
                raise ValueError("dictionary entries must be non-empty")
            encoded.append((ident, password))
        return cls(entries=tuple(encoded))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def read_dictionary_file(path, cross: bool = False) -> tuple[tuple[str, str], ...]:
    """Parse a dictionary file: one id<TAB>password pair per line, UTF-8.

    Line order is significant.  With cross=True the distinct identities and
    distinct passwords in the file are expanded to their full cross product
    (identity-major, both in first-seen order).
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        ident, sep, password = line.partition("\t")
        if not sep or not ident or not password:
            raise ValueError(f"malformed dictionary line {lineno}: {line!r}")
        pairs.append((ident, password))
    if cross:
        ids = list(dict.fromkeys(i for i, _ in pairs))
        passwords = list(dict.fromkeys(p for _, p in pairs))
        pairs = [(i, p) for i in ids for p in passwords]
    return tuple(pairs)


@dataclass(frozen=True)
class GuessResult:
    """Outcome of an offline guessing run, with the work it took."""

    user_id: bytes | None
    password: bytes | None
    evaluations: int

    @property
    def found(self) -> bool:
        return self.user_id is not None


def guess_credentials(extracted: ExtractedSecrets, dictionary: Dictionary) -> GuessResult:
    """Test candidate (id, password) pairs against the stolen card's check value.

    Runs the same computation the card itself does at login, entirely
    offline: a candidate matches when h(id || h_y || h(b || password))
    equals the stored c_i.  Returns the first match in dictionary order, or
    a not-found result after exhausting the dictionary.
    """
    evaluations = 0
    for user_id, password in dictionary:
        evaluations += 1
        a_guess = h(extracted.b, password)
        if h(user_id, extracted.h_y, a_guess) == extracted.c_i:
            return GuessResult(user_id=user_id, password=password, evaluations=evaluations)
    return GuessResult(user_id=None, password=None, evaluations=evaluations)


def forge_login(
    own: SmartCard | ExtractedSecrets,
    own_id: bytes,
    own_password: bytes,
    target_sid: bytes,
    rng: BlockRng,
) -> tuple[M1, CardSession]:
    """Build a login message for target_sid from the attacker's own card.

    A registered but malicious user needs nothing beyond their own card
    values and credentials: the resulting M1 is structurally identical to
    an honest one, and the control server has no way to attribute it.  The
    returned session state lets the attacker finish the run and compute the
    session key like any honest card would.
    """
    a_t = h(own.b, own_password)
    b_t = xor(own.d_i, h(own_id, a_t))
    n_i1 = random_block(rng)
    f_i = xor(own.h_y, n_i1)
    p_ij = xor(own.e_i, h(own.h_y, n_i1, target_sid))
    cid_i = xor(a_t, h(b_t, f_i, n_i1))
    g_i = h(b_t, a_t, n_i1)
    return M1(f_i=f_i, g_i=g_i, p_ij=p_ij, cid_i=cid_i), CardSession(a_i=a_t, b_i=b_t, n_i1=n_i1)


def replay_login(captured: M1) -> M1:
    """Re-inject a previously observed login message, byte for byte.

    Nothing in M1 binds it to a session: the server adds its own fresh
    nonce and the control server checks only M1's internal consistency, so
    the stale message passes both verifications again.
    """
    return M1(f_i=captured.f_i, g_i=captured.g_i, p_ij=captured.p_ij, cid_i=captured.cid_i)


class AdversaryKnowledge:
    """Values the channel adversary has seen, plus a one-step derivation closure.

    knows() checks membership in the observed set extended by one round of
    the operations available to the adversary: XOR of two observed
    equal-length values, and the protocol hash of one observed value or of
    an observed pair.
    """

    def __init__(self):
        self._seen: set[bytes] = set()

    def observe(self, *values: bytes) -> None:
        for value in values:
            self._seen.add(bytes(value))

    def values(self) -> frozenset[bytes]:
        return frozenset(self._seen)

    def knows(self, target: bytes) -> bool:
        if target in self._seen:
            return True
        seen = list(self._seen)
        for i, a in enumerate(seen):
            for b in seen[i + 1:]:
                if len(a) == len(b) and xor(a, b) == target:
                    return True
        for a in seen:
            if h(a) == target:
                return True
        for a in seen:
            for b in seen:
                if h(a, b) == target:
                    return True
        return False


@dataclass(frozen=True)
class AttackReport:
    """Machine-checked outcome of one attack scenario."""

    name: str
    success: bool
    work: int
    recovered: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "record": "report",
            "name": self.name,
            "success": self.success,
            "work": self.work,
            "recovered": dict(self.recovered),
        }

    @classmethod
    def from_record(cls, record: dict) -> "AttackReport":
        return cls(
            name=record["name"],
            success=bool(record["success"]),
            work=int(record["work"]),
            recovered=dict(record["recovered"]),
        )
