"""Synthetic event logs for tests, demos, and the acceptance suite.

``contest_fixture("full")`` reproduces the published contest shape:
78,390 members of whom 351 are referral recruits (309 direct, 42
indirect), 36k+ clickers, 1k+ link creators, and the full proposal
outcome table. ``"mini"`` is the same shape at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Union

from .events import EventRecord

START = datetime(2014, 4, 1, tzinfo=timezone.utc)


class _Emitter:
    def __init__(self, start: datetime = START):
        self.records: list[EventRecord] = []
        self._t = start

    def emit(self, etype: str, **payload) -> EventRecord:
        rec = EventRecord(seq=len(self.records) + 1, ts=self._t, type=etype, payload=payload)
        self.records.append(rec)
        self._t += timedelta(seconds=1)
        return rec


@dataclass
class Fixture:
    records: list[EventRecord]
    expected: dict = field(default_factory=dict)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(r.to_line() for r in self.records))
            if self.records:
                fh.write("\n")
        return path


@dataclass(frozen=True)
class _Scale:
    existing_sharers: int
    direct_via_staff: int
    direct_via_member: int
    direct_sharers: int
    nonmember_sharers: int
    indirect_via_direct: int
    indirect_via_nms: int
    indirect_deep: int  # third-degree recruits hanging off indirect sharers
    organic_members: int
    total_clickers: int
    # proposal columns: (winners, finalist_only, plain) per group
    direct_proposals: tuple[int, int, int]
    indirect_proposals: tuple[int, int, int]
    organic_proposals: tuple[int, int, int]


_SCALES = {
    "full": _Scale(
        existing_sharers=60,
        direct_via_staff=249,
        direct_via_member=60,
        direct_sharers=30,
        nonmember_sharers=994,
        indirect_via_direct=30,
        indirect_via_nms=10,
        indirect_deep=2,
        organic_members=77_979,
        total_clickers=36_213,
        direct_proposals=(7, 6, 39),
        indirect_proposals=(2, 1, 2),
        organic_proposals=(120, 108, 999),
    ),
    "mini": _Scale(
        existing_sharers=3,
        direct_via_staff=3,
        direct_via_member=2,
        direct_sharers=2,
        nonmember_sharers=2,
        indirect_via_direct=1,
        indirect_via_nms=1,
        indirect_deep=0,
        organic_members=8,
        total_clickers=16,
        direct_proposals=(1, 0, 1),
        indirect_proposals=(0, 1, 0),
        organic_proposals=(1, 1, 1),
    ),
}

# Statuses cycled across winner-column proposals; every one outranks
# plain finalists, and one indirect recruit lands the grand prize.
_WINNER_STATUSES = ("judges_choice", "popular_choice")


def contest_fixture(scale: str = "mini") -> Fixture:
    try:
        s = _SCALES[scale]
    except KeyError:
        raise ValueError(f"unknown fixture scale {scale!r}") from None

    em = _Emitter()
    member_serial = 0

    def register(visitor: str) -> str:
        nonlocal member_serial
        member_serial += 1
        mid = f"m{member_serial:06d}"
        em.emit("member_registered", visitor=visitor, member=mid)
        return mid

    # Staff link, condensed root for all staff shares.
    em.emit("link_created", token="tok:staff", owner_visitor="staff:1",
            email_hash="eh:staff", staff=True, consent=True)

    # Established members who later share their own links.
    sharer_tokens: list[str] = []
    sharer_members: list[str] = []
    for i in range(s.existing_sharers):
        vid = f"v:member{i:04d}"
        sharer_members.append(register(vid))
        # membership precedes their first click, keeping them "existing".
    for i in range(s.existing_sharers):
        vid = f"v:member{i:04d}"
        em.emit("click", token="tok:staff", visitor=vid)
        tok = f"tok:member{i:04d}"
        em.emit("link_created", token=tok, owner_visitor=vid,
                email_hash=f"eh:member{i:04d}", consent=True)
        sharer_tokens.append(tok)

    # Direct recruits: clicked an affiliated link, then joined.
    direct_ids: list[str] = []
    direct_members: list[str] = []
    direct_tokens: list[str] = []
    n_direct = s.direct_via_staff + s.direct_via_member
    for i in range(n_direct):
        vid = f"v:direct{i:04d}"
        if i < s.direct_via_staff or not sharer_tokens:
            tok = "tok:staff"
        else:
            tok = sharer_tokens[i % len(sharer_tokens)]
        em.emit("click", token=tok, visitor=vid)
        if i < s.direct_sharers:
            own = f"tok:direct{i:04d}"
            em.emit("link_created", token=own, owner_visitor=vid,
                    email_hash=f"eh:direct{i:04d}", consent=True)
            direct_tokens.append(own)
        direct_members.append(register(vid))
        direct_ids.append(vid)

    # Non-member sharers: clicked, created a link, never joined.
    nms_tokens: list[str] = []
    for i in range(s.nonmember_sharers):
        vid = f"v:nms{i:04d}"
        em.emit("click", token="tok:staff", visitor=vid)
        tok = f"tok:nms{i:04d}"
        em.emit("link_created", token=tok, owner_visitor=vid,
                email_hash=f"eh:nms{i:04d}", consent=True)
        nms_tokens.append(tok)

    # Indirect recruits: parent was not yet a member at the parent's own
    # first click (a fellow recruit or a non-member sharer).
    indirect_ids: list[str] = []
    indirect_members: list[str] = []
    indirect_tokens: list[str] = []
    n_indirect = s.indirect_via_direct + s.indirect_via_nms + s.indirect_deep
    for i in range(n_indirect):
        vid = f"v:indirect{i:04d}"
        if i < s.indirect_via_direct:
            tok = direct_tokens[i % len(direct_tokens)]
        elif i < s.indirect_via_direct + s.indirect_via_nms:
            tok = nms_tokens[i % len(nms_tokens)]
        else:
            tok = indirect_tokens[i % len(indirect_tokens)]
        em.emit("click", token=tok, visitor=vid)
        # The first couple of indirect recruits share onward so the deep
        # (third-degree) recruits have a token to click.
        if s.indirect_deep and i < 2:
            own = f"tok:indirect{i:04d}"
            em.emit("link_created", token=own, owner_visitor=vid,
                    email_hash=f"eh:indirect{i:04d}", consent=True)
            indirect_tokens.append(own)
        indirect_members.append(register(vid))
        indirect_ids.append(vid)

    # Passive clickers fill the engagement funnel out to the target.
    engaged = s.existing_sharers + n_direct + s.nonmember_sharers + n_indirect
    n_passive = s.total_clickers - engaged
    if n_passive < 0:
        raise ValueError("total_clickers smaller than engaged participants")
    for i in range(n_passive):
        em.emit("click", token="tok:staff", visitor=f"v:passive{i:05d}")

    # Organic members, never part of the referral network.
    organic_members = [register(f"v:organic{i:05d}") for i in range(s.organic_members)]

    # Proposal activity feeding the outcome columns.
    def author_proposals(members: list[str], group: str,
                         winners: int, finalists: int, plain: int) -> None:
        assert winners + finalists + plain <= len(members)
        serial = 0
        for j in range(winners + finalists + plain):
            pid = f"prop:{group}{j:04d}"
            em.emit("proposal_authored", member=members[j], proposal=pid)
            if j < winners:
                em.emit("proposal_result", proposal=pid, status="finalist")
                if group == "indirect" and j == 0:
                    status = "grand_prize"
                else:
                    status = _WINNER_STATUSES[serial % len(_WINNER_STATUSES)]
                    serial += 1
                em.emit("proposal_result", proposal=pid, status=status)
            elif j < winners + finalists:
                em.emit("proposal_result", proposal=pid, status="finalist")

    author_proposals(direct_members, "direct", *s.direct_proposals)
    author_proposals(indirect_members, "indirect", *s.indirect_proposals)
    author_proposals(organic_members, "organic", *s.organic_proposals)

    dw, df, dp = s.direct_proposals
    iw, if_, ip = s.indirect_proposals
    ow, of, op = s.organic_proposals
    other_users = s.existing_sharers + s.organic_members
    expected = {
        "counts": {
            "clickers": s.total_clickers,
            "link_creators": s.existing_sharers + s.direct_sharers
            + s.nonmember_sharers + len(indirect_tokens),
            "new_recruits": n_direct + n_indirect,
            "direct": n_direct,
            "indirect": n_indirect,
        },
        "table1": {
            "snp_recruits": _row(n_direct + n_indirect, dw + df + dp + iw + if_ + ip,
                                 dw + df + iw + if_, dw + iw),
            "direct": _row(n_direct, dw + df + dp, dw + df, dw),
            "indirect": _row(n_indirect, iw + if_ + ip, iw + if_, iw),
            "other_members": _row(other_users, ow + of + op, ow + of, ow),
            "total": _row(n_direct + n_indirect + other_users,
                          dw + df + dp + iw + if_ + ip + ow + of + op,
                          dw + df + iw + if_ + ow + of, dw + iw + ow),
        },
    }
    return Fixture(records=em.records, expected=expected)


def _row(users: int, authors: int, finalists: int, winners: int) -> dict[str, int]:
    return {
        "users": users,
        "proposal_authors": authors,
        "finalists": finalists,
        "winners": winners,
    }


def figure1_fixture() -> Fixture:
    """The four-person demo chain: alice -> bob -> carol -> dave, dave joins."""
    em = _Emitter()
    em.emit("link_created", token="tok:alice", owner_visitor="alice",
            email_hash="eh:alice", consent=True)
    em.emit("click", token="tok:alice", visitor="bob")
    em.emit("link_created", token="tok:bob", owner_visitor="bob",
            email_hash="eh:bob", consent=True)
    em.emit("click", token="tok:bob", visitor="carol")
    em.emit("link_created", token="tok:carol", owner_visitor="carol",
            email_hash="eh:carol", consent=True)
    em.emit("click", token="tok:carol", visitor="dave")
    em.emit("member_registered", visitor="dave", member="m:dave")
    return Fixture(
        records=em.records,
        expected={"chain_of_dave": ["carol", "bob", "alice"]},
    )
