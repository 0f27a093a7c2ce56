"""Referral forest core: participants, share tokens, click attribution, classification.

The graph is a deterministic fold over an ordered event sequence (see
``snp.events``). All state lives in plain dicts so a snapshot can be
serialized canonically and hashed.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Optional

# All staff-issued tokens attribute to this single condensed identity so that
# staff re-sharing never inflates the network.
STAFF_ROOT_ID = "staff:root"

# Proposal result ranks. Winner statuses outrank plain finalists; a winning
# proposal necessarily reached the finalist stage first.
RESULT_RANKS = {
    "semifinalist": 1,
    "finalist": 2,
    "popular_choice": 3,
    "judges_choice": 3,
    "grand_prize": 4,
}
FINALIST_RANK = 2
WINNER_RANK = 3


class GraphError(Exception):
    """Base class for referral-graph contract violations."""


class UnknownTokenError(GraphError):
    pass


class DuplicateTokenError(GraphError):
    pass


class UnknownParticipantError(GraphError):
    pass


class DoubleRegistrationError(GraphError):
    pass


class DuplicateMemberIdError(GraphError):
    pass


class UnknownMemberError(GraphError):
    pass


class UnknownProposalError(GraphError):
    pass


class ClickOutcome(str, Enum):
    ATTRIBUTED = "attributed"
    ALREADY_ATTRIBUTED = "already_attributed"
    SELF_CLICK_IGNORED = "self_click_ignored"


class Kind(str, Enum):
    EXISTING_MEMBER = "existing_member"
    DIRECT_RECRUIT = "direct_recruit"
    INDIRECT_RECRUIT = "indirect_recruit"
    NON_MEMBER_SHARER = "non_member_sharer"
    PASSIVE_CLICKER = "passive_clicker"


@dataclass
class Participant:
    id: str
    email_hash: Optional[str] = None
    is_staff: bool = False
    first_click_at: Optional[datetime] = None
    member_id: Optional[str] = None
    member_since: Optional[datetime] = None
    country: Optional[str] = None
    has_clicked: bool = False


@dataclass(frozen=True)
class ReferralToken:
    token: str
    owner: str
    created_at: datetime
    staff_canonical: bool = False


@dataclass(frozen=True)
class ReferralEdge:
    child: str
    parent: str
    via_token: str
    established_at: datetime


@dataclass(frozen=True)
class Classification:
    kind: Kind
    degrees_from_established: Optional[int] = None


@dataclass
class Proposal:
    id: str
    authors: set[str] = field(default_factory=set)
    best_rank: int = 0


def new_token_value() -> str:
    """URL-safe token with 128 bits of entropy."""
    return secrets.token_urlsafe(16)


class ReferralGraph:
    """Mutable referral-network state; mutate only through the apply_* methods.

    Single-writer: callers serialize mutations (the event log is the one
    writer in the service). Reads never mutate.
    """

    def __init__(self) -> None:
        self.participants: dict[str, Participant] = {}
        self.tokens: dict[str, ReferralToken] = {}
        self.edges: dict[str, ReferralEdge] = {}  # keyed by child id
        self.proposals: dict[str, Proposal] = {}
        self.member_index: dict[str, str] = {}  # member_id -> visitor id
        self.member_proposals: dict[str, set[str]] = {}
        self.link_index: dict[tuple[str, str], str] = {}  # (owner, email_hash) -> token
        self.staff_canonical_token: Optional[str] = None
        self.last_seq: int = 0
        self._owners: Optional[set[str]] = None
        self._owners_version: int = -1

    # -- participants -------------------------------------------------

    def ensure_participant(self, visitor: str) -> Participant:
        p = self.participants.get(visitor)
        if p is None:
            p = Participant(id=visitor)
            self.participants[visitor] = p
        return p

    def get_participant(self, visitor: str) -> Participant:
        p = self.participants.get(visitor)
        if p is None:
            raise UnknownParticipantError(f"unknown participant {visitor!r}")
        return p

    def _ensure_staff_root(self) -> Participant:
        root = self.participants.get(STAFF_ROOT_ID)
        if root is None:
            root = Participant(id=STAFF_ROOT_ID, is_staff=True)
            self.participants[STAFF_ROOT_ID] = root
        return root

    # -- tokens -------------------------------------------------------

    def issue_token(
        self,
        owner: str,
        now: datetime,
        staff: bool = False,
        token: Optional[str] = None,
        email_hash: Optional[str] = None,
    ) -> ReferralToken:
        """Create a share token for ``owner``.

        When replaying a log the token value comes from the event; live
        issuance generates a fresh unguessable value, retrying on the
        (astronomically unlikely) collision.
        """
        if token is None:
            token = new_token_value()
            while token in self.tokens:
                token = new_token_value()
        elif token in self.tokens:
            raise DuplicateTokenError(f"token {token!r} already issued")

        p = self.ensure_participant(owner)
        if email_hash and p.email_hash is None:
            p.email_hash = email_hash
        canonical = False
        if staff:
            p.is_staff = True
            self._ensure_staff_root()
            if self.staff_canonical_token is None:
                self.staff_canonical_token = token
                canonical = True

        rec = ReferralToken(token=token, owner=owner, created_at=now, staff_canonical=canonical)
        self.tokens[token] = rec
        if email_hash:
            self.link_index.setdefault((owner, email_hash), token)
        return rec

    def resolve_parent(self, token: ReferralToken) -> str:
        """Attribution target of a token; staff tokens condense to the staff root."""
        owner = self.participants.get(token.owner)
        if owner is not None and owner.is_staff:
            return STAFF_ROOT_ID
        return token.owner

    def find_token(self, owner: str, email_hash: str) -> Optional[str]:
        return self.link_index.get((owner, email_hash))

    # -- clicks -------------------------------------------------------

    def record_click(
        self,
        token: str,
        visitor: str,
        now: datetime,
        country: Optional[str] = None,
    ) -> ClickOutcome:
        tok = self.tokens.get(token)
        if tok is None:
            raise UnknownTokenError(f"unknown token {token!r}")

        p = self.ensure_participant(visitor)
        p.has_clicked = True
        if country and p.country is None:
            p.country = country

        parent = self.resolve_parent(tok)
        if visitor == parent or visitor == STAFF_ROOT_ID:
            return ClickOutcome.SELF_CLICK_IGNORED
        if visitor in self.edges:
            return ClickOutcome.ALREADY_ATTRIBUTED
        # Refuse edges that would close a cycle (clicking a link owned by
        # your own descendant is a self-reward loop in disguise).
        if self._is_ancestor(visitor, parent):
            return ClickOutcome.SELF_CLICK_IGNORED

        self.ensure_participant(parent)
        self.edges[visitor] = ReferralEdge(
            child=visitor, parent=parent, via_token=token, established_at=now
        )
        if p.first_click_at is None:
            p.first_click_at = now
        return ClickOutcome.ATTRIBUTED

    def _is_ancestor(self, candidate: str, start: str) -> bool:
        cur = start
        while cur in self.edges:
            cur = self.edges[cur].parent
            if cur == candidate:
                return True
        return False

    # -- membership ---------------------------------------------------

    def register_member(self, visitor: str, member_id: str, now: datetime) -> Participant:
        # Members can surface without a prior click (organic signups get a
        # cookie when logged in), so create the record on first sight.
        p = self.ensure_participant(visitor)
        if p.member_id is not None:
            raise DoubleRegistrationError(f"{visitor!r} already registered as {p.member_id!r}")
        if member_id in self.member_index:
            raise DuplicateMemberIdError(f"member id {member_id!r} already in use")
        p.member_id = member_id
        p.member_since = now
        self.member_index[member_id] = visitor
        return p

    # -- proposals ----------------------------------------------------

    def record_proposal_author(self, member_id: str, proposal_id: str) -> None:
        if member_id not in self.member_index:
            raise UnknownMemberError(f"proposal author {member_id!r} is not a registered member")
        prop = self.proposals.get(proposal_id)
        if prop is None:
            prop = Proposal(id=proposal_id)
            self.proposals[proposal_id] = prop
        prop.authors.add(member_id)
        self.member_proposals.setdefault(member_id, set()).add(proposal_id)

    def record_proposal_result(self, proposal_id: str, status: str) -> None:
        if status not in RESULT_RANKS:
            raise GraphError(f"unknown proposal status {status!r}")
        prop = self.proposals.get(proposal_id)
        if prop is None:
            raise UnknownProposalError(f"result for unknown proposal {proposal_id!r}")
        prop.best_rank = max(prop.best_rank, RESULT_RANKS[status])

    # -- classification -----------------------------------------------

    def is_established(self, visitor: str) -> bool:
        """True if the participant counts as directly affiliated: staff, or a
        member from before (or at) their own first click."""
        p = self.participants.get(visitor)
        if p is None:
            return False
        if p.is_staff or visitor == STAFF_ROOT_ID:
            return True
        if p.member_since is None:
            return False
        return p.first_click_at is None or p.member_since <= p.first_click_at

    def degrees_from_established(self, visitor: str) -> int:
        d = 0
        cur = visitor
        while cur in self.edges:
            cur = self.edges[cur].parent
            d += 1
            if self.is_established(cur):
                return d
        # Chain ran out without hitting an affiliated ancestor: whoever
        # referred the chain root is unobserved, one hop further up.
        return d + 1

    def classify(self, visitor: str) -> Classification:
        p = self.get_participant(visitor)
        if p.is_staff:
            return Classification(Kind.EXISTING_MEMBER)
        if p.member_since is not None:
            if p.first_click_at is None or p.member_since <= p.first_click_at:
                return Classification(Kind.EXISTING_MEMBER)
            d = self.degrees_from_established(visitor)
            kind = Kind.DIRECT_RECRUIT if d == 1 else Kind.INDIRECT_RECRUIT
            return Classification(kind, degrees_from_established=d)
        if visitor in self._token_owner_cache():
            return Classification(Kind.NON_MEMBER_SHARER)
        return Classification(Kind.PASSIVE_CLICKER)

    def _token_owner_cache(self) -> set[str]:
        # Tokens are append-only, so the cache is valid while the count holds.
        if self._owners is None or self._owners_version != len(self.tokens):
            self._owners = {t.owner for t in self.tokens.values()}
            self._owners_version = len(self.tokens)
        return self._owners

    def chain_of(self, visitor: str) -> list[str]:
        """Ancestors of ``visitor``, nearest parent first."""
        self.get_participant(visitor)
        chain: list[str] = []
        seen = {visitor}
        cur = visitor
        while cur in self.edges:
            cur = self.edges[cur].parent
            if cur in seen:
                raise GraphError(f"cycle detected walking chain of {visitor!r}")
            seen.add(cur)
            chain.append(cur)
        return chain

    # -- aggregates ---------------------------------------------------

    def members(self) -> Iterable[Participant]:
        return (p for p in self.participants.values() if p.member_since is not None)

    def network_counts(self) -> dict[str, int]:
        clickers = 0
        new_recruits = direct = indirect = 0
        owners = self._token_owner_cache()
        link_creators = sum(
            1 for o in owners if not self.participants[o].is_staff and o != STAFF_ROOT_ID
        )
        for p in self.participants.values():
            if p.is_staff:
                continue
            if p.has_clicked:
                clickers += 1
            if p.member_since is not None:
                c = self.classify(p.id)
                if c.kind is Kind.DIRECT_RECRUIT:
                    direct += 1
                elif c.kind is Kind.INDIRECT_RECRUIT:
                    indirect += 1
        new_recruits = direct + indirect
        return {
            "clickers": clickers,
            "link_creators": link_creators,
            "new_recruits": new_recruits,
            "direct": direct,
            "indirect": indirect,
        }

    def check_forest(self) -> None:
        """Raise GraphError if any parent chain fails to terminate."""
        for child in self.edges:
            seen = {child}
            cur = child
            while cur in self.edges:
                cur = self.edges[cur].parent
                if cur in seen:
                    raise GraphError(f"cycle through {child!r}")
                seen.add(cur)

    # -- snapshots ----------------------------------------------------

    def to_snapshot(self) -> dict:
        from .events import format_ts  # local import to avoid a cycle

        def ts(v):
            return format_ts(v) if v is not None else None

        return {
            "last_seq": self.last_seq,
            "staff_canonical_token": self.staff_canonical_token,
            "participants": {
                p.id: {
                    "email_hash": p.email_hash,
                    "is_staff": p.is_staff,
                    "first_click_at": ts(p.first_click_at),
                    "member_id": p.member_id,
                    "member_since": ts(p.member_since),
                    "country": p.country,
                    "has_clicked": p.has_clicked,
                }
                for p in self.participants.values()
            },
            "tokens": {
                t.token: {
                    "owner": t.owner,
                    "created_at": ts(t.created_at),
                    "staff_canonical": t.staff_canonical,
                }
                for t in self.tokens.values()
            },
            "edges": {
                e.child: {
                    "parent": e.parent,
                    "via_token": e.via_token,
                    "established_at": ts(e.established_at),
                }
                for e in self.edges.values()
            },
            "proposals": {
                pr.id: {"authors": sorted(pr.authors), "best_rank": pr.best_rank}
                for pr in self.proposals.values()
            },
            "link_index": sorted(
                [owner, email_hash, token]
                for (owner, email_hash), token in self.link_index.items()
            ),
        }

    @classmethod
    def from_snapshot(cls, data: dict) -> "ReferralGraph":
        from .events import parse_ts

        def ts(v):
            return parse_ts(v) if v is not None else None

        g = cls()
        g.last_seq = data["last_seq"]
        g.staff_canonical_token = data.get("staff_canonical_token")
        for pid, d in data["participants"].items():
            g.participants[pid] = Participant(
                id=pid,
                email_hash=d.get("email_hash"),
                is_staff=d.get("is_staff", False),
                first_click_at=ts(d.get("first_click_at")),
                member_id=d.get("member_id"),
                member_since=ts(d.get("member_since")),
                country=d.get("country"),
                has_clicked=d.get("has_clicked", False),
            )
            if d.get("member_id"):
                g.member_index[d["member_id"]] = pid
        for tok, d in data["tokens"].items():
            g.tokens[tok] = ReferralToken(
                token=tok,
                owner=d["owner"],
                created_at=ts(d["created_at"]),
                staff_canonical=d.get("staff_canonical", False),
            )
        for owner, email_hash, tok in data.get("link_index", []):
            g.link_index[(owner, email_hash)] = tok
        for child, d in data["edges"].items():
            g.edges[child] = ReferralEdge(
                child=child,
                parent=d["parent"],
                via_token=d["via_token"],
                established_at=ts(d["established_at"]),
            )
        for pid, d in data["proposals"].items():
            g.proposals[pid] = Proposal(id=pid, authors=set(d["authors"]), best_rank=d["best_rank"])
            for author in d["authors"]:
                g.member_proposals.setdefault(author, set()).add(pid)
        return g
