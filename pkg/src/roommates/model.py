"""Preference profiles, matchings, blocking pairs and egalitarian cost.

Agents are dense integer ids ``0..n-1``; external names map to ids through
``Profile.names``. A preference list is a sequence of tie groups, earlier
groups strictly preferred. Ranks are 0-based and tie-collapsing: the rank of
``j`` for ``i`` counts the agents ``i`` strictly prefers to ``j``.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .errors import DomainError

Pair = tuple[int, int]
Matching = frozenset[Pair]
TieGroup = tuple[int, ...]


def pair(x: int, y: int) -> Pair:
    """Canonical unordered pair (smaller id first)."""
    return (x, y) if x < y else (y, x)


@dataclass(frozen=True)
class Profile:
    """Validated, immutable preference profile.

    ``lists[i]`` holds the tie groups of agent ``i`` (ids sorted inside each
    group). Mutual acceptability is enforced at construction.
    """
    lists: tuple[tuple[TieGroup, ...], ...]
    names: tuple[str, ...] = ()
    _ranks: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)
    _groups: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lists = tuple(tuple(tuple(sorted(group)) for group in groups) for groups in self.lists)
        n = len(lists)
        names = tuple(self.names) if self.names else tuple(str(i) for i in range(n))
        if len(names) != n:
            raise DomainError(f"expected {n} agent names, got {len(names)}")
        if len(set(names)) != n:
            raise DomainError("agent names must be unique")
        object.__setattr__(self, "lists", lists)
        object.__setattr__(self, "names", names)

        ranks = []
        groups_of = []
        for i, groups in enumerate(lists):
            rank_map: dict[int, int] = {}
            group_map: dict[int, int] = {}
            seen = 0
            if not groups:
                raise DomainError(f"agent '{names[i]}' has an empty preference list")
            for g, group in enumerate(groups):
                if not group:
                    raise DomainError(f"agent '{names[i]}' has an empty tie group")
                for j in group:
                    if not 0 <= j < n:
                        raise DomainError(f"agent '{names[i]}' lists unknown agent id {j}")
                    if j == i:
                        raise DomainError(f"agent '{names[i]}' lists itself")
                    if j in rank_map:
                        raise DomainError(f"agent '{names[i]}' lists '{names[j]}' twice")
                    rank_map[j] = seen
                    group_map[j] = g
                seen += len(group)
            ranks.append(rank_map)
            groups_of.append(group_map)

        for i, rank_map in enumerate(ranks):
            for j in rank_map:
                if i not in ranks[j]:
                    raise DomainError(
                        f"acceptability is not mutual: '{names[i]}' lists '{names[j]}' but not vice versa"
                    )

        object.__setattr__(self, "_ranks", tuple(ranks))
        object.__setattr__(self, "_groups", tuple(groups_of))

    @classmethod
    def from_lists(
        cls,
        lists: Sequence[Sequence[int | Iterable[int]]],
        names: Sequence[str] | None = None,
    ) -> "Profile":
        """Build from per-agent entries, each an id or an iterable of tied ids."""
        normalized = []
        for entries in lists:
            groups = []
            for entry in entries:
                if isinstance(entry, int):
                    groups.append((entry,))
                else:
                    groups.append(tuple(entry))
            normalized.append(tuple(groups))
        return cls(tuple(normalized), tuple(names) if names else ())

    @classmethod
    def from_named(
        cls,
        names: Sequence[str],
        prefs: Mapping[str, Sequence[str | Sequence[str]]],
    ) -> "Profile":
        """Build from agent names and per-agent entries (a name or a list of tied names).

        Example:
            Profile.from_named(["1", "2"], {"1": ["2"], "2": ["1"]})
        """
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise DomainError("agent names must be unique")

        def lookup(owner: str, name: str) -> int:
            if name not in index:
                raise DomainError(f"agent '{owner}' lists unknown agent '{name}'")
            return index[name]

        unknown = sorted(set(prefs) - set(index))
        if unknown:
            raise DomainError(f"preferences given for unknown agent '{unknown[0]}'")

        lists = []
        for name in names:
            groups = []
            for entry in prefs.get(name, ()):
                if isinstance(entry, str):
                    groups.append((lookup(name, entry),))
                else:
                    groups.append(tuple(lookup(name, e) for e in entry))
            lists.append(tuple(groups))
        return cls(tuple(lists), tuple(names))

    @property
    def n(self) -> int:
        return len(self.lists)

    def agent(self, name: str) -> int:
        """Id of the agent called ``name``."""
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown agent '{name}'")

    def acceptable(self, i: int) -> tuple[int, ...]:
        """Acceptable agents of ``i`` in preference order (tied ids ascending)."""
        return tuple(j for group in self.lists[i] for j in group)

    def degree(self, i: int) -> int:
        return len(self._ranks[i])

    def is_acceptable(self, i: int, j: int) -> bool:
        return j in self._ranks[i]

    def rank(self, i: int, j: int | None) -> int:
        """Number of agents ``i`` strictly prefers to ``j``; ``None`` ranks at the list length."""
        if j is None:
            return len(self._ranks[i])
        try:
            return self._ranks[i][j]
        except KeyError:
            raise DomainError(f"'{self.names[j]}' is not acceptable to '{self.names[i]}'")

    def prefers(self, i: int, x: int | None, y: int | None) -> bool:
        """True iff ``i`` strictly prefers ``x`` to ``y`` (``None`` = unmatched)."""
        return self.rank(i, x) < self.rank(i, y)

    def tie_group(self, i: int, j: int) -> TieGroup:
        """The tie group of ``i``'s list that contains ``j``."""
        if j not in self._groups[i]:
            raise DomainError(f"'{self.names[j]}' is not acceptable to '{self.names[i]}'")
        return self.lists[i][self._groups[i][j]]

    def weakly_preferred_count(self, i: int, j: int) -> int:
        """``|{x in V_i \\ {j} : x weakly preferred to j}|``, the worst rank of ``j`` over linearizations."""
        return self.rank(i, j) + len(self.tie_group(i, j)) - 1

    @property
    def has_ties(self) -> bool:
        return any(len(group) > 1 for groups in self.lists for group in groups)

    @property
    def is_complete(self) -> bool:
        return all(self.degree(i) == self.n - 1 for i in range(self.n))

    def edges(self) -> list[Pair]:
        """Acceptability edges, sorted."""
        return sorted(pair(i, j) for i in range(self.n) for j in self._ranks[i] if i < j)

    def edge_cost(self, e: Pair) -> int:
        """``rank_x(y) + rank_y(x)`` for the edge ``{x, y}``."""
        x, y = e
        return self.rank(x, y) + self.rank(y, x)

    def pair_names(self, e: Pair) -> list[str]:
        return [self.names[e[0]], self.names[e[1]]]


def fresh_names(profile: Profile, stem: str, count: int) -> list[str]:
    """``count`` names ``~<stem>1..`` that clash with no agent of ``profile``."""
    taken = set(profile.names)
    prefix = "~" + stem
    while any(f"{prefix}{i}" in taken for i in range(1, count + 1)):
        prefix = "~" + prefix
    return [f"{prefix}{i}" for i in range(1, count + 1)]


def require_no_ties(profile: Profile, what: str) -> None:
    """Raise DomainError when ``profile`` has ties."""
    if profile.has_ties:
        raise DomainError(f"{what} requires preferences without ties")


# Matchings

def partners(m: Iterable[Pair]) -> dict[int, int]:
    """Map each matched agent to its partner."""
    mate: dict[int, int] = {}
    for x, y in m:
        mate[x] = y
        mate[y] = x
    return mate


def partner(m: Iterable[Pair], x: int) -> int | None:
    """Partner of ``x`` in ``m`` or None."""
    return partners(m).get(x)


def validate_matching(profile: Profile, m: Iterable[Pair]) -> None:
    """Raise DomainError unless ``m`` is a set of disjoint acceptable pairs."""
    seen: set[int] = set()
    for x, y in m:
        if x == y or not profile.is_acceptable(x, y):
            raise DomainError(f"pair {{{profile.names[x]}, {profile.names[y]}}} is not mutually acceptable")
        for agent in (x, y):
            if agent in seen:
                raise DomainError(f"agent '{profile.names[agent]}' is matched twice")
            seen.add(agent)


def make_matching(profile: Profile, pairs: Iterable[tuple[int, int]]) -> Matching:
    """Validated matching from (unordered) pairs."""
    m = frozenset(pair(x, y) for x, y in pairs)
    validate_matching(profile, m)
    return m


def matching_from_names(profile: Profile, pairs: Iterable[tuple[str, str]]) -> Matching:
    return make_matching(profile, ((profile.agent(a), profile.agent(b)) for a, b in pairs))


def sort_matching(m: Iterable[Pair]) -> list[Pair]:
    return sorted(m)


# Cost semantics

@dataclass(frozen=True)
class CostSemantics:
    """How unmatched agents are priced: list length, zero, or a constant ``c``."""
    kind: str = "listlen"
    c: int = 0

    def __post_init__(self):
        if self.kind not in ("listlen", "zero", "const"):
            raise DomainError(f"unknown cost model '{self.kind}'")
        if self.kind == "const" and self.c < 1:
            raise DomainError("constant unmatched cost must be a positive integer")

    @classmethod
    def parse(cls, text: str) -> "CostSemantics":
        """Parse ``listlen``, ``zero`` or ``const:<c>``."""
        text = text.strip()
        if text in ("listlen", "zero"):
            return cls(text)
        if text.startswith("const:"):
            try:
                c = int(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad cost model '{text}'")
            return cls("const", c)
        raise DomainError(f"bad cost model '{text}' (expected listlen, zero or const:<c>)")

    def unmatched_cost(self, profile: Profile, x: int) -> int:
        if self.kind == "listlen":
            return profile.degree(x)
        if self.kind == "zero":
            return 0
        return self.c

    def __str__(self) -> str:
        return f"const:{self.c}" if self.kind == "const" else self.kind


LIST_LENGTH = CostSemantics("listlen")
ZERO = CostSemantics("zero")


# Stability and cost

def _blocks(profile: Profile, mate: Mapping[int, int], x: int, y: int) -> bool:
    return profile.prefers(x, y, mate.get(x)) and profile.prefers(y, x, mate.get(y))


def rank(profile: Profile, owner: int, target: int | None) -> int:
    """``rank_owner(target)``; ``None`` means unmatched and ranks at the list length."""
    return profile.rank(owner, target)


def is_blocking(profile: Profile, m: Iterable[Pair], e: tuple[int, int]) -> bool:
    """True iff the unmatched acceptable pair ``e`` blocks ``m``.

    Raises:
        DomainError: if ``e`` is in ``m`` or not mutually acceptable
    """
    x, y = pair(*e)
    m = frozenset(m)
    if not profile.is_acceptable(x, y):
        raise DomainError(f"pair {{{profile.names[x]}, {profile.names[y]}}} is not mutually acceptable")
    if (x, y) in m:
        raise DomainError(f"pair {{{profile.names[x]}, {profile.names[y]}}} is already matched")
    return _blocks(profile, partners(m), x, y)


def blocking_pairs(profile: Profile, m: Iterable[Pair]) -> set[Pair]:
    """All unmatched acceptable pairs that block ``m``."""
    m = frozenset(m)
    mate = partners(m)
    return {e for e in profile.edges() if e not in m and _blocks(profile, mate, *e)}


def blocking_agents(profile: Profile, m: Iterable[Pair]) -> set[int]:
    """Agents that take part in at least one blocking pair."""
    return {agent for e in blocking_pairs(profile, m) for agent in e}


def is_stable(profile: Profile, m: Iterable[Pair]) -> bool:
    m = frozenset(m)
    mate = partners(m)
    return not any(e not in m and _blocks(profile, mate, *e) for e in profile.edges())


def is_perfect(profile: Profile, m: Iterable[Pair]) -> bool:
    return len(partners(m)) == profile.n


def egalitarian_cost(profile: Profile, m: Iterable[Pair], semantics: CostSemantics = LIST_LENGTH) -> int:
    """Sum of partner ranks, unmatched agents priced by ``semantics``."""
    mate = partners(m)
    total = 0
    for x in range(profile.n):
        if x in mate:
            total += profile.rank(x, mate[x])
        else:
            total += semantics.unmatched_cost(profile, x)
    return total
