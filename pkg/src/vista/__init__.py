"""Tutor interaction-log analytics.

Parses the 11-attribute interaction log, reconstructs step-level attempt
provenance, traces per-skill mastery, computes the coordinated-view payloads,
and answers temporal sequence queries. See the HTTP service in
:mod:`vista.service` and the CLI in :mod:`vista.cli`.
"""

from .events import (
    Action,
    Correctness,
    FormatError,
    InteractionRecord,
    RecordError,
    normalize,
    parse_log,
    serialize,
)
from .provenance import (
    Attempt,
    AttemptKey,
    AttemptStatus,
    Segment,
    SegmentKind,
    StepTrace,
    classify,
    reconstruct,
    reconstruct_attempts,
)
from .bkt import (
    ALL_MASTERED,
    BktParams,
    MasteryState,
    is_mastered,
    select_next_problem_type,
    trajectory,
    update,
)
from .analytics import (
    DetailPath,
    OverviewRow,
    StepPath,
    TimelineBar,
    attempt_details,
    overview,
    problem_type_paths,
    student_timeline,
)
from .seqquery import (
    EventToken,
    Match,
    SequencePattern,
    build_streams,
    find_matches,
    parse_pattern,
    tokenize,
)
from .simulator import SimProfile, TutorSpec, demo_corpus, simulate

__version__ = "0.1.0"
