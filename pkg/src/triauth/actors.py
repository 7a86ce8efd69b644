"""Honest protocol participants: cardholder, service server, control server.

Registration provisions a smart card from the control server's master
secrets.  Login and authentication then run a four-message hash-and-XOR
exchange (M1 card->server, M2 server->CS, M3 CS->server, M4 server->card)
after which all three parties hold the same session key.
"""

from dataclasses import dataclass

from .crypto import DIGEST_LEN, BlockRng, h, random_block, xor


class ProtocolError(Exception):
    """A verification check failed and the session stops."""


class LocalCheckFailed(ProtocolError):
    """The smart card rejected the entered identity/password."""


class ServerAuthFailed(ProtocolError):
    """The control server rejected the service server's proof."""


class UserAuthFailed(ProtocolError):
    """The control server rejected the login message."""


class CSAuthFailed(ProtocolError):
    """The control server's response failed verification downstream."""


def _require_digests(**fields: bytes) -> None:
    for name, value in fields.items():
        if len(value) != DIGEST_LEN:
            raise ValueError(f"{name} must be {DIGEST_LEN} bytes, got {len(value)}")


@dataclass(frozen=True)
class ControlServer:
    """Registration authority; its master secrets x and y never leave it."""

    x: bytes
    y: bytes

    def __post_init__(self):
        _require_digests(x=self.x, y=self.y)

    @classmethod
    def generate(cls, rng: BlockRng) -> "ControlServer":
        return cls(x=random_block(rng), y=random_block(rng))

    @property
    def h_y(self) -> bytes:
        return h(self.y)


@dataclass(frozen=True)
class ServerSecrets:
    """Per-server provisioning: the two derived keys shared with one server."""

    sid: bytes
    k_sid_y: bytes  # h(sid || y)
    k_x_y: bytes    # h(x || y)

    def __post_init__(self):
        if not self.sid:
            raise ValueError("sid must be non-empty")
        _require_digests(k_sid_y=self.k_sid_y, k_x_y=self.k_x_y)


@dataclass(frozen=True)
class SmartCard:
    """Values stored on an issued card, plus the holder's random b."""

    c_i: bytes
    d_i: bytes
    e_i: bytes
    h_y: bytes
    b: bytes

    def __post_init__(self):
        _require_digests(c_i=self.c_i, d_i=self.d_i, e_i=self.e_i, h_y=self.h_y, b=self.b)


@dataclass(frozen=True)
class M1:
    """Login request from the card to the service server."""

    f_i: bytes
    g_i: bytes
    p_ij: bytes
    cid_i: bytes

    def __post_init__(self):
        _require_digests(f_i=self.f_i, g_i=self.g_i, p_ij=self.p_ij, cid_i=self.cid_i)


@dataclass(frozen=True)
class M2:
    """Forwarded login plus the server's own proof, sent to the control server."""

    m1: M1
    sid: bytes
    k_i: bytes
    m_i: bytes

    def __post_init__(self):
        if not self.sid:
            raise ValueError("sid must be non-empty")
        _require_digests(k_i=self.k_i, m_i=self.m_i)


@dataclass(frozen=True)
class M3:
    """Control server's response to the service server."""

    q_i: bytes
    r_i: bytes
    v_i: bytes
    t_i: bytes

    def __post_init__(self):
        _require_digests(q_i=self.q_i, r_i=self.r_i, v_i=self.v_i, t_i=self.t_i)


@dataclass(frozen=True)
class M4:
    """Final confirmation forwarded from the server to the card."""

    v_i: bytes
    t_i: bytes

    def __post_init__(self):
        _require_digests(v_i=self.v_i, t_i=self.t_i)


@dataclass(frozen=True)
class CardSession:
    """Card-side state kept between sending M1 and checking M4."""

    a_i: bytes
    b_i: bytes
    n_i1: bytes


@dataclass(frozen=True)
class ServerSession:
    """Server-side state kept between sending M2 and checking M3."""

    n_i2: bytes
    m1: M1


@dataclass(frozen=True)
class CsSession:
    """Everything the control server derived while authenticating one login."""

    a_i: bytes
    b_i: bytes
    n_i1: bytes
    n_i2: bytes
    n_i3: bytes
    session_key: bytes


@dataclass(frozen=True)
class ServerResult:
    """Server-side recovered values and the agreed session key."""

    session_key: bytes
    h_ab: bytes
    nonce_xor: bytes


def register_server(cs: ControlServer, sid: bytes) -> ServerSecrets:
    """Provision a service server: derive its two shared keys from sid.

    The control server keeps no per-server record; both keys are
    re-derivable from its master secrets.
    """
    if not sid:
        raise ValueError("sid must be non-empty")
    return ServerSecrets(sid=sid, k_sid_y=h(sid, cs.y), k_x_y=h(cs.x, cs.y))


def register_user(cs: ControlServer, user_id: bytes, a_i: bytes, b: bytes) -> SmartCard:
    """Issue a smart card for (user_id, a_i) and store the holder's b on it.

    Only user_id and the blinded verifier a_i = h(b || password) are inputs
    to the card values; b itself is written by the holder after issuance and
    never crosses the registration channel.
    """
    if not user_id:
        raise ValueError("user_id must be non-empty")
    b_i = h(user_id, cs.x)
    return SmartCard(
        c_i=h(user_id, cs.h_y, a_i),
        d_i=xor(b_i, h(user_id, a_i)),
        e_i=xor(b_i, h(cs.y, cs.x)),
        h_y=cs.h_y,
        b=b,
    )


def enroll_user(cs: ControlServer, user_id: bytes, password: bytes, rng: BlockRng) -> SmartCard:
    """Full registration ceremony: draw b, blind the password, obtain a card."""
    if not password:
        raise ValueError("password must be non-empty")
    b = random_block(rng)
    return register_user(cs, user_id, h(b, password), b)


def card_login(
    card: SmartCard, user_id: bytes, password: bytes, sid: bytes, rng: BlockRng
) -> tuple[M1, CardSession]:
    """Local password check, then build the login request M1 for sid.

    Raises LocalCheckFailed if (user_id, password) does not match the card's
    stored check value; nothing is sent in that case.
    """
    a_i = h(card.b, password)
    if h(user_id, card.h_y, a_i) != card.c_i:
        raise LocalCheckFailed("identity/password rejected by card")
    n_i1 = random_block(rng)
    b_i = xor(card.d_i, h(user_id, a_i))
    f_i = xor(card.h_y, n_i1)
    p_ij = xor(card.e_i, h(card.h_y, n_i1, sid))
    cid_i = xor(a_i, h(b_i, f_i, n_i1))
    g_i = h(b_i, a_i, n_i1)
    return M1(f_i=f_i, g_i=g_i, p_ij=p_ij, cid_i=cid_i), CardSession(a_i=a_i, b_i=b_i, n_i1=n_i1)


def server_forward(secrets: ServerSecrets, m1: M1, rng: BlockRng) -> tuple[M2, ServerSession]:
    """Wrap a received M1 with the server's own masked nonce and proof.

    The server performs no check on M1; it cannot, since every M1 field is
    masked with values only the card and the control server know.
    """
    n_i2 = random_block(rng)
    k_i = xor(secrets.k_sid_y, n_i2)
    m_i = h(secrets.k_x_y, n_i2)
    return M2(m1=m1, sid=secrets.sid, k_i=k_i, m_i=m_i), ServerSession(n_i2=n_i2, m1=m1)


def cs_authenticate(cs: ControlServer, m2: M2, rng: BlockRng) -> tuple[M3, CsSession]:
    """Verify server and user, then build M3 and derive the session key.

    Raises ServerAuthFailed if the server proof m_i does not check out,
    UserAuthFailed if the recovered login values do not satisfy g_i.
    """
    n_i2 = xor(h(m2.sid, cs.y), m2.k_i)
    if h(h(cs.x, cs.y), n_i2) != m2.m_i:
        raise ServerAuthFailed("server proof mismatch")
    h_y = cs.h_y
    m1 = m2.m1
    n_i1 = xor(h_y, m1.f_i)
    b_i = xor(xor(m1.p_ij, h(h_y, n_i1, m2.sid)), h(cs.y, cs.x))
    a_i = xor(m1.cid_i, h(b_i, m1.f_i, n_i1))
    if h(b_i, a_i, n_i1) != m1.g_i:
        raise UserAuthFailed("login message inconsistent")
    n_i3 = random_block(rng)
    nonce_xor = xor(xor(n_i1, n_i2), n_i3)
    h_ab = h(a_i, b_i)
    m3 = M3(
        q_i=xor(xor(n_i1, n_i3), h(m2.sid, n_i2)),
        r_i=xor(h_ab, h(nonce_xor)),
        v_i=h(h_ab, h(nonce_xor)),
        t_i=xor(xor(n_i2, n_i3), h(a_i, b_i, n_i1)),
    )
    session = CsSession(
        a_i=a_i, b_i=b_i, n_i1=n_i1, n_i2=n_i2, n_i3=n_i3,
        session_key=h(h_ab, nonce_xor),
    )
    return m3, session


def server_verify(secrets: ServerSecrets, session: ServerSession, m3: M3) -> tuple[M4, ServerResult]:
    """Check the control server's response and pass the confirmation on.

    The server only ever learns the combined value n_i1 XOR n_i3, never
    n_i1 itself; the session key needs only the three-way XOR, so that is
    enough.  Raises CSAuthFailed on a v_i mismatch.
    """
    n1_xor_n3 = xor(m3.q_i, h(secrets.sid, session.n_i2))
    nonce_xor = xor(n1_xor_n3, session.n_i2)
    h_ab = xor(m3.r_i, h(nonce_xor))
    if h(h_ab, h(nonce_xor)) != m3.v_i:
        raise CSAuthFailed("control server response rejected by server")
    result = ServerResult(session_key=h(h_ab, nonce_xor), h_ab=h_ab, nonce_xor=nonce_xor)
    return M4(v_i=m3.v_i, t_i=m3.t_i), result


def card_verify(session: CardSession, m4: M4) -> bytes:
    """Check the final confirmation and return the card's session key.

    Raises CSAuthFailed on a v_i mismatch (stale or tampered response).
    """
    n2_xor_n3 = xor(m4.t_i, h(session.a_i, session.b_i, session.n_i1))
    nonce_xor = xor(session.n_i1, n2_xor_n3)
    h_ab = h(session.a_i, session.b_i)
    if h(h_ab, h(nonce_xor)) != m4.v_i:
        raise CSAuthFailed("control server response rejected by card")
    return h(h_ab, nonce_xor)
