"""Executable model of a three-party smart-card login scheme and its attacks.

The protocol: a control server provisions smart cards and service servers
from two master secrets; login runs a four-message hash-and-XOR exchange
ending in a shared session key.  The package demonstrates three practical
attacks against it: offline credential guessing from extracted card
secrets, masquerading by any registered user, and replay of a captured
login message.
"""

from .crypto import (
    DIGEST_LEN,
    HASH_NAME,
    BlockRng,
    concat,
    h,
    hash_bytes,
    random_block,
    split_concat,
    xor,
)
from .actors import (
    M1,
    M2,
    M3,
    M4,
    CardSession,
    ControlServer,
    CSAuthFailed,
    CsSession,
    LocalCheckFailed,
    ProtocolError,
    ServerAuthFailed,
    ServerResult,
    ServerSecrets,
    ServerSession,
    SmartCard,
    UserAuthFailed,
    card_login,
    card_verify,
    cs_authenticate,
    enroll_user,
    register_server,
    register_user,
    server_forward,
    server_verify,
)
from .attacks import (
    AdversaryKnowledge,
    AttackReport,
    Dictionary,
    ExtractedSecrets,
    GuessResult,
    extract_card,
    forge_login,
    guess_credentials,
    read_dictionary_file,
    replay_login,
)
from .simulator import (
    ARTIFACT_VERSION,
    ATTACK_KINDS,
    KINDS,
    MUTATION_TARGETS,
    AdversaryPolicy,
    ChannelEvent,
    CheckRecord,
    ConfigError,
    PartyOutcome,
    ScenarioConfig,
    ScenarioResult,
    Transcript,
    TranscriptFormatError,
    adversary_tap,
    decode_message,
    encode_message,
    flip_byte,
    run_scenario,
    verify_transcript,
)

__version__ = ARTIFACT_VERSION
