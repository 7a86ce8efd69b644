"""Shared driver for the raw actor pipeline, used across test modules."""

from dataclasses import dataclass

from triauth import (
    M1,
    M2,
    M3,
    M4,
    BlockRng,
    CardSession,
    ControlServer,
    CsSession,
    ServerResult,
    ServerSecrets,
    ServerSession,
    SmartCard,
    card_login,
    card_verify,
    cs_authenticate,
    enroll_user,
    register_server,
    server_forward,
    server_verify,
)


@dataclass
class HonestRun:
    cs: ControlServer
    secrets: ServerSecrets
    card: SmartCard
    m1: M1
    card_session: CardSession
    m2: M2
    server_session: ServerSession
    m3: M3
    cs_session: CsSession
    m4: M4
    server_result: ServerResult
    card_sk: bytes


def honest_run(
    seed: int = 0,
    user_id: bytes = b"alice",
    password: bytes = b"pw123",
    sid: bytes = b"server-1",
) -> HonestRun:
    """Drive registration plus one full login exchange, keeping every intermediate."""
    rng_cs = BlockRng(seed, "cs")
    rng_user = BlockRng(seed, "user")
    rng_server = BlockRng(seed, "server")
    cs = ControlServer.generate(rng_cs)
    secrets = register_server(cs, sid)
    card = enroll_user(cs, user_id, password, rng_user)
    m1, card_session = card_login(card, user_id, password, sid, rng_user)
    m2, server_session = server_forward(secrets, m1, rng_server)
    m3, cs_session = cs_authenticate(cs, m2, rng_cs)
    m4, server_result = server_verify(secrets, server_session, m3)
    card_sk = card_verify(card_session, m4)
    return HonestRun(
        cs=cs,
        secrets=secrets,
        card=card,
        m1=m1,
        card_session=card_session,
        m2=m2,
        server_session=server_session,
        m3=m3,
        cs_session=cs_session,
        m4=m4,
        server_result=server_result,
        card_sk=card_sk,
    )


def flip(data: bytes, pos: int, mask: int = 0x01) -> bytes:
    """Return data with one byte XORed by mask."""
    assert 0 <= pos < len(data) and 1 <= mask <= 0xFF
    return data[:pos] + bytes([data[pos] ^ mask]) + data[pos + 1:]
