"""Experience sharing: blogs, the tutors' tag-indexed forum, and the
learning contract lifecycle.

Blogs exist from the moment their owner does (one per student, one per
group) and are never created or destroyed afterwards. Group posts are
drafts until the leader confirms them. The forum is the tutors' shared
practice space: discussions carry tags drawn from a three-tree subject
taxonomy that tutors may extend and the director curates.
"""

from __future__ import annotations

from datetime import datetime
from typing import Any

from .errors import (
    AlreadyExists,
    AlreadyPublished,
    ContractLocked,
    DuplicateLabel,
    EmptyTags,
    Forbidden,
    OutOfRange,
    ProtectedSubject,
    UnknownActor,
    UnknownDiscussion,
    UnknownEventSeq,
    UnknownGroup,
    UnknownParent,
    UnknownPost,
    UnknownTag,
)
from .events import EventKind
from .model import (
    BlogPost,
    CONTRACT_QUESTIONS,
    CourseStatus,
    Discussion,
    FORUM_WRITE_ROLES,
    LearningContract,
    PostStatus,
    Role,
    TaxonomySubject,
)
from .policy import Action, ResourceRef, require
from .store import Snapshot, Store


# -- blogs ---------------------------------------------------------------------


def write_student_post(store: Store, actor_id: str, body: str,
                       at: datetime | None = None) -> BlogPost:
    """Personal posts publish immediately; only the owner writes them."""
    blog = store.state.blogs.get(actor_id)
    if blog is None or actor_id not in store.state.actors:
        raise UnknownActor(f"{actor_id} has no personal blog")
    require(store.state, actor_id, Action.WRITE, ResourceRef.student_blog(actor_id))
    post_id = store.next_id("pst", _post_count(store))
    store.commit(
        EventKind.BLOG_POST,
        actor_id,
        {"action": "publish", "blog_owner_id": actor_id, "post_id": post_id, "body": body},
        at=at,
    )
    return store.state.blogs[actor_id].posts[-1]


def propose_group_post(store: Store, actor_id: str, group_id: str, body: str,
                       at: datetime | None = None) -> BlogPost:
    if group_id not in store.state.groups:
        raise UnknownGroup(f"no group {group_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.group_blog_draft(group_id))
    post_id = store.next_id("pst", _post_count(store))
    store.commit(
        EventKind.BLOG_POST,
        actor_id,
        {"action": "propose", "blog_owner_id": group_id, "post_id": post_id, "body": body},
        at=at,
    )
    return store.state.blogs[group_id].posts[-1]


def confirm_group_post(store: Store, actor_id: str, group_id: str, post_id: str,
                       at: datetime | None = None) -> BlogPost:
    """The leader decides what the group publishes."""
    group = store.state.groups.get(group_id)
    if group is None:
        raise UnknownGroup(f"no group {group_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.group_blog(group_id))
    post = store.state.blogs[group_id].find(post_id)
    if post is None:
        raise UnknownPost(f"no post {post_id} on the blog of {group_id}")
    if post.status == PostStatus.PUBLISHED:
        raise AlreadyPublished(f"post {post_id} is already published")
    store.commit(
        EventKind.BLOG_POST,
        actor_id,
        {"action": "confirm", "blog_owner_id": group_id, "post_id": post_id},
        at=at,
    )
    return post


def _post_count(store: Store) -> int:
    return sum(len(b.posts) for b in store.state.blogs.values())


def visible_posts(snap: Snapshot, viewer_id: str, owner_id: str) -> list[BlogPost]:
    """Posts of one blog the viewer may see; drafts only with draft access."""
    from .policy import authorize

    blog = snap.state.blogs.get(owner_id)
    if blog is None:
        raise UnknownActor(f"no blog for {owner_id}")
    if owner_id in snap.state.groups:
        require(snap.state, viewer_id, Action.READ, ResourceRef.group_blog(owner_id))
        drafts_ok = authorize(
            snap.state, viewer_id, Action.READ, ResourceRef.group_blog_draft(owner_id)
        ).allow
        return [p for p in blog.posts
                if p.status == PostStatus.PUBLISHED or drafts_ok or p.author_id == viewer_id]
    require(snap.state, viewer_id, Action.READ, ResourceRef.student_blog(owner_id))
    return list(blog.posts)


# -- forum ---------------------------------------------------------------------


def _require_forum_author(store: Store, actor_id: str) -> None:
    actor = store.state.actors.get(actor_id)
    if actor is None:
        raise UnknownActor(f"no actor {actor_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.forum())
    if actor.role not in FORUM_WRITE_ROLES:
        raise Forbidden("the community forum is written by tutor-side roles", rule_id="R6")


def create_discussion(store: Store, actor_id: str, title: str, body: str,
                      tags: set[str], at: datetime | None = None) -> Discussion:
    _require_forum_author(store, actor_id)
    tag_set = set(tags)
    if not tag_set:
        raise EmptyTags("a discussion needs at least one tag")
    for tag in tag_set:
        if tag not in store.state.taxonomy:
            raise UnknownTag(f"no taxonomy subject {tag}")
    discussion_id = store.next_id("dsc", len(store.state.discussions))
    store.commit(
        EventKind.FORUM_MESSAGE,
        actor_id,
        {"action": "open", "discussion_id": discussion_id, "title": title,
         "body": body, "tags": sorted(tag_set)},
        at=at,
    )
    return store.state.discussions[discussion_id]


def reply(store: Store, actor_id: str, discussion_id: str, body: str,
          at: datetime | None = None) -> Discussion:
    _require_forum_author(store, actor_id)
    discussion = store.state.discussions.get(discussion_id)
    if discussion is None:
        raise UnknownDiscussion(f"no discussion {discussion_id}")
    store.commit(
        EventKind.FORUM_MESSAGE,
        actor_id,
        {"action": "reply", "discussion_id": discussion_id, "body": body},
        at=at,
    )
    return discussion


def propose_subject(store: Store, actor_id: str, parent_id: str, label: str,
                    at: datetime | None = None) -> TaxonomySubject:
    """Tutors grow the taxonomy; proposals are immediately usable as tags."""
    _require_forum_author(store, actor_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.taxonomy())
    parent = store.state.taxonomy.get(parent_id)
    if parent is None:
        raise UnknownParent(f"no taxonomy subject {parent_id}")
    _check_sibling_label(store, parent_id, label)
    subject_id = store.next_id("sbj-p", store.state.proposal_count)
    store.commit(
        EventKind.TAXONOMY_CHANGE,
        actor_id,
        {"action": "propose", "subject_id": subject_id, "parent_id": parent_id, "label": label},
        at=at,
    )
    return store.state.taxonomy[subject_id]


def rename_subject(store: Store, actor_id: str, subject_id: str, label: str,
                   at: datetime | None = None) -> TaxonomySubject:
    """Director-only curation; roots are fixed."""
    _require_director(store, actor_id)
    subject = _subject(store, subject_id)
    if subject.parent_id is None:
        raise ProtectedSubject("the three root subjects cannot be renamed")
    _check_sibling_label(store, subject.parent_id, label, ignore=subject_id)
    store.commit(
        EventKind.TAXONOMY_CHANGE,
        actor_id,
        {"action": "rename", "subject_id": subject_id, "label": label},
        at=at,
    )
    return subject


def merge_subjects(store: Store, actor_id: str, subject_id: str, into_id: str,
                   at: datetime | None = None) -> TaxonomySubject:
    """Fold one subject into another: its discussions are re-tagged and its
    children re-parented onto the target."""
    _require_director(store, actor_id)
    source = _subject(store, subject_id)
    target = _subject(store, into_id)
    if source.parent_id is None:
        raise ProtectedSubject("the three root subjects cannot be merged away")
    if source.id == target.id:
        raise ProtectedSubject("cannot merge a subject into itself")
    # The target must not sit inside the source's subtree, or the forest tears.
    cursor: TaxonomySubject | None = target
    while cursor is not None:
        if cursor.id == source.id:
            raise ProtectedSubject("target lies under the subject being merged")
        cursor = store.state.taxonomy.get(cursor.parent_id) if cursor.parent_id else None
    target_child_labels = {
        s.label for s in store.state.taxonomy.values() if s.parent_id == into_id
    }
    for child in store.state.taxonomy.values():
        if child.parent_id == subject_id and child.label in target_child_labels:
            raise DuplicateLabel(
                f"child {child.label!r} already exists under the merge target"
            )
    store.commit(
        EventKind.TAXONOMY_CHANGE,
        actor_id,
        {"action": "merge", "subject_id": subject_id, "into_id": into_id},
        at=at,
    )
    return target


def _require_director(store: Store, actor_id: str) -> None:
    actor = store.state.actors.get(actor_id)
    if actor is None:
        raise UnknownActor(f"no actor {actor_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.taxonomy())
    if actor.role != Role.DIRECTOR:
        raise Forbidden("taxonomy curation belongs to the director", rule_id="R6")


def _subject(store: Store, subject_id: str) -> TaxonomySubject:
    subject = store.state.taxonomy.get(subject_id)
    if subject is None:
        raise UnknownTag(f"no taxonomy subject {subject_id}")
    return subject


def _check_sibling_label(store: Store, parent_id: str, label: str,
                         ignore: str | None = None) -> None:
    for s in store.state.taxonomy.values():
        if s.parent_id == parent_id and s.label == label and s.id != ignore:
            raise DuplicateLabel(f"{label!r} already exists under {parent_id}")


def descendants(snap: Snapshot, subject_id: str) -> set[str]:
    """The subject plus everything below it."""
    out = {subject_id}
    frontier = [subject_id]
    children: dict[str, list[str]] = {}
    for s in snap.state.taxonomy.values():
        if s.parent_id is not None:
            children.setdefault(s.parent_id, []).append(s.id)
    while frontier:
        node = frontier.pop()
        for child in children.get(node, ()):
            if child not in out:
                out.add(child)
                frontier.append(child)
    return out


def search_discussions(snap: Snapshot, tag_set: set[str]) -> list[Discussion]:
    """Rank by number of query tags matched (a discussion matches a tag when
    tagged with it or any of its descendants), then most recent message,
    then id."""
    expanded: dict[str, set[str]] = {}
    for tag in tag_set:
        if tag not in snap.state.taxonomy:
            raise UnknownTag(f"no taxonomy subject {tag}")
        expanded[tag] = descendants(snap, tag)
    scored = []
    for discussion in snap.state.discussions.values():
        score = sum(1 for tag in expanded if discussion.tags & expanded[tag])
        if score > 0:
            scored.append((score, discussion))
    scored.sort(key=lambda item: (-item[0], -item[1].last_message_at().timestamp(), item[1].id))
    return [d for _, d in scored]


def taxonomy_doc(snap: Snapshot) -> list[dict[str, Any]]:
    return [
        {
            "id": s.id,
            "label": s.label,
            "parent_id": s.parent_id,
            "root": s.root.value,
            "status": s.status.value,
        }
        for s in sorted(snap.state.taxonomy.values(), key=lambda s: s.id)
    ]


def export_forum(snap: Snapshot) -> dict[str, Any]:
    """Canonical document of the taxonomy plus all discussions."""
    return {
        "taxonomy": taxonomy_doc(snap),
        "discussions": [
            {
                "id": d.id,
                "title": d.title,
                "opener_id": d.opener_id,
                "tags": sorted(d.tags),
                "messages": [
                    {"author_id": m.author_id, "body": m.body, "at": m.at.isoformat()}
                    for m in d.messages
                ],
            }
            for d in sorted(snap.state.discussions.values(), key=lambda d: d.id)
        ],
    }


def import_forum(store: Store, doc: dict[str, Any]) -> None:
    """Replay a forum document into this store (actors must already exist).

    Rebuilds proposals and discussions through the normal operations, so the
    result answers every tag search exactly like the exporting store."""
    by_id = {s["id"]: s for s in doc["taxonomy"]}
    pending = [s for s in doc["taxonomy"] if s["parent_id"] is not None
               and s["id"] not in store.state.taxonomy]
    id_map = {s.id: s.id for s in store.state.taxonomy.values()}
    progress = True
    while pending and progress:
        progress = False
        remaining = []
        for s in pending:
            parent = id_map.get(s["parent_id"])
            if parent is None and s["parent_id"] in by_id:
                remaining.append(s)
                continue
            fresh = store.state.taxonomy.get(s["id"])
            if fresh is None:
                created = propose_subject(store, _any_director(store), parent or s["parent_id"], s["label"])
                id_map[s["id"]] = created.id
            else:
                id_map[s["id"]] = s["id"]
            progress = True
        pending = remaining
    if pending:
        raise UnknownParent("forum document contains unreachable subjects")
    for d in doc["discussions"]:
        tags = {id_map.get(t, t) for t in d["tags"]}
        first, rest = d["messages"][0], d["messages"][1:]
        created = create_discussion(store, first["author_id"], d["title"], first["body"], tags)
        for message in rest:
            reply(store, message["author_id"], created.id, message["body"])


def _any_director(store: Store) -> str:
    for actor in store.state.actors.values():
        if actor.role == Role.DIRECTOR:
            return actor.id
    raise UnknownActor("no director registered")


# -- learning contracts ---------------------------------------------------------------


def init_learning_contract(store: Store, actor_id: str, owner_id: str,
                           answers: dict[str, str],
                           at: datetime | None = None) -> LearningContract:
    """One six-question contract per actor, written before closure and then
    frozen for the whole course."""
    if owner_id not in store.state.actors:
        raise UnknownActor(f"no actor {owner_id}")
    if owner_id in store.state.contracts:
        raise AlreadyExists(f"{owner_id} already holds a contract")
    course = store.state.course
    if course is not None and course.status == CourseStatus.CLOSED:
        raise ContractLocked("contracts are written before the course closes")
    require(store.state, actor_id, Action.WRITE, ResourceRef.contract(owner_id))
    _check_answers(answers)
    store.commit(
        EventKind.CONTRACT_UPDATE,
        actor_id,
        {"action": "init", "owner_id": owner_id,
         "answers": {q: answers[q] for q in CONTRACT_QUESTIONS}},
        at=at,
    )
    return store.state.contracts[owner_id]


def revise_learning_contract(store: Store, actor_id: str, owner_id: str,
                             answers: dict[str, str], linked_event_seqs: list[int],
                             at: datetime | None = None) -> LearningContract:
    """After closure the owner revisits the contract, linking the blog and
    forum events that shaped the revision."""
    if owner_id not in store.state.actors:
        raise UnknownActor(f"no actor {owner_id}")
    contract = store.state.contracts.get(owner_id)
    if contract is None:
        raise UnknownPost(f"{owner_id} holds no contract to revise")
    course = store.state.course
    if course is None or course.status != CourseStatus.CLOSED:
        # checked before the policy gate so the lock keeps its own error code
        raise ContractLocked("contracts cannot be modified during the course")
    require(store.state, actor_id, Action.WRITE, ResourceRef.contract(owner_id))
    _check_answers(answers)
    seqs = sorted(set(int(s) for s in linked_event_seqs))
    for seq in seqs:
        ev = store.event_by_seq(seq)
        if ev is None:
            raise UnknownEventSeq(f"no event {seq} in the log")
        if ev.kind not in (EventKind.BLOG_POST, EventKind.FORUM_MESSAGE):
            raise UnknownEventSeq(f"event {seq} is not a blog or forum event")
    store.commit(
        EventKind.CONTRACT_UPDATE,
        actor_id,
        {"action": "revise", "owner_id": owner_id,
         "answers": {q: answers[q] for q in CONTRACT_QUESTIONS},
         "linked_event_seqs": seqs},
        at=at,
    )
    return store.state.contracts[owner_id]


def _check_answers(answers: dict[str, str]) -> None:
    missing = [q for q in CONTRACT_QUESTIONS if not str(answers.get(q, "")).strip()]
    if missing:
        raise OutOfRange(f"all six questions need answers; missing {missing[0]!r}")


def contract_doc(contract: LearningContract) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "owner_id": contract.owner_id,
        "status": contract.status.value,
        "answers": {q: contract.answers[q] for q in CONTRACT_QUESTIONS},
        "created_at": contract.created_at.isoformat(),
    }
    if contract.revision is not None:
        doc["revision"] = {
            "answers": {q: contract.revision.answers[q] for q in CONTRACT_QUESTIONS},
            "linked_event_seqs": contract.revision.linked_event_seqs,
            "revised_at": contract.revision.revised_at.isoformat(),
        }
    return doc
