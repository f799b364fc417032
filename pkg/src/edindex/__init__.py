"""Indexing schemes for fast approximate insertion/deletion edit distance,
and the insdel codes built on them."""
from .blockcode import BlockCodebook, RecoveryLists, amplify_decoder, gen_codebook, list_decode, list_recover
from .channel import CorruptionRecord, corrupt, verify_record
from .codes import (
    ListInsdelCode,
    UniqueInsdelCode,
    build_unique_code,
    convert_lr_to_insdel,
    decode_unique,
    encode_list,
    encode_unique,
    list_decode_insdel,
)
from .errors import (
    AlphabetMismatch,
    BlockDecodeError,
    ConstructionFailed,
    DecodeFailure,
    EdIndexError,
    EngineFailure,
    InvalidMatching,
    InvalidScript,
    LengthMismatch,
    ListOverflow,
)
from .indexing import (
    IndexingScheme,
    build_indexing_scheme,
    build_two_layer_scheme,
    ed_approx,
    enhanced_ed_approx,
    graph_stats,
    run_ed_approx,
)
from .kernels import available_backends, set_backend
from .matching import EdgeSet, NonCrossingMatching, matching_to_script, max_noncrossing_matching
from .strings import (
    AlphabetSpec,
    EditScript,
    IndexedString,
    apply_edit_script,
    edit_distance_exact,
    index_concat,
    lcs_from_ed,
)
from .sync import (
    PositionDecoding,
    SyncString,
    count_misdecodings,
    gen_sync,
    self_matching_bound,
    sync_decode_global,
    verify_sync,
)

__version__ = "0.1.0"
