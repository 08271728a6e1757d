"""JSON reports printed by the CLI."""

import json
from dataclasses import asdict, dataclass, field

from .formats import format_matching
from .model import Matching, Profile, blocking_agents, blocking_pairs, sort_matching

SCHEMA = 1

FOUND = "found"
NOT_FOUND = "not_found"
TRIVIAL_NO = "trivial_no"
OK = "ok"


@dataclass
class SolveReport:
    """Outcome of one CLI invocation."""
    command: str
    status: str
    matching: list[list[str]] | None = None
    value: int | None = None
    bound: int | None = None
    blocking_pairs: list[list[str]] | None = None
    blocking_agents: list[str] | None = None
    seed: int | None = None
    timing_ms: float | None = None
    extra: dict = field(default_factory=dict)

    def attach(self, profile: Profile, m: Matching) -> "SolveReport":
        """Fill in the named matching with its blocking pairs and agents."""
        self.matching = format_matching(profile, m)
        self.blocking_pairs = [profile.pair_names(e) for e in sort_matching(blocking_pairs(profile, m))]
        self.blocking_agents = sorted(profile.names[a] for a in blocking_agents(profile, m))
        return self


def to_json(report: SolveReport, include_timing: bool = True) -> str:
    """Deterministic JSON rendering; only ``timing_ms`` varies between runs."""
    data = {"schema": SCHEMA, **asdict(report)}
    if not include_timing:
        data.pop("timing_ms")
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)
