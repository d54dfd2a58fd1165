"""Local JSON-over-HTTP session service for the browser UI.

One session holds one immutable full network plus a navigable view
history.  Mutations serialize per session behind a lock; every mutation
response embeds the fresh state counts so clients stay consistent without
a follow-up read.  Sessions can be exported to (and recreated from) a zip
archive holding the pair files, the current attribute table, and the view
history as ordered id-set documents.
"""

from __future__ import annotations

import base64
import io
import json
import threading
import uuid
import zipfile
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import analytics, ingest
from .errors import (CitnetError, ContractError, InputFormatError,
                     PreconditionError, UnknownIdError)
from .explore import (ExpansionSpec, SelectionSpec, Session, drill_down,
                      expand, history_navigate, resolve_selection, title_search)
from .layout import LayoutParams, compose_frame
from .model import NetworkView, build_network

ARCHIVE_VERSION = 1


@dataclass
class SessionEntry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    frame_cache: dict = field(default_factory=dict)

    def cached_frame(self, params: LayoutParams) -> dict:
        key = (self.session.current.state_key(), params)
        if key not in self.frame_cache:
            if len(self.frame_cache) >= 16:
                self.frame_cache.pop(next(iter(self.frame_cache)))
            self.frame_cache[key] = compose_frame(self.session.current, params).to_dict()
        return self.frame_cache[key]


class CreateSessionBody(BaseModel):
    format: str  # "wos" | "pairs" | "archive"
    wos: Optional[str] = None
    publications: Optional[str] = None
    citations: Optional[str] = None
    archive_b64: Optional[str] = None
    incomplete_min_citations: int = 10


class MarkBody(BaseModel):
    ids: list[str]
    marked: bool = True


class SelectionBody(BaseModel):
    mode: str
    year_min: Optional[int] = None
    year_max: Optional[int] = None
    group_id: Optional[int] = None
    include_predecessors: bool = False
    include_successors: bool = False
    include_intermediates: bool = False
    min_relations: int = 1

    def to_spec(self) -> SelectionSpec:
        return SelectionSpec(
            mode=self.mode,
            year_min=self.year_min,
            year_max=self.year_max,
            group_id=self.group_id,
            include_predecessors=self.include_predecessors,
            include_successors=self.include_successors,
            include_intermediates=self.include_intermediates,
            min_relations=self.min_relations,
        )


class ExpandBody(BaseModel):
    add_predecessors: bool = False
    add_successors: bool = False
    add_intermediates: bool = False
    min_relations: int = 1


class ClusterBody(BaseModel):
    resolution: float = 1.0
    min_cluster_size: int = 1
    policy: str = "merge"
    seed: int = 0


class CoresBody(BaseModel):
    k: int
    action: str = "mark"  # "mark" | "select" | "none"


class PathBody(BaseModel):
    from_id: str
    to_id: str
    kind: str = "shortest"
    max_paths: int = 100


def _state_doc(entry: SessionEntry) -> dict:
    s = entry.session
    view = s.current
    return {
        "counts": view.counts(),
        "full_network": {
            "publications": s.network.n_publications,
            "citation_relations": s.network.n_edges,
        },
        "marked": sorted(view.marked),
        "history": {
            "position": s.cursor,
            "length": len(s.views),
            "can_back": s.can_back,
            "can_forward": s.can_forward,
        },
    }


def create_app() -> FastAPI:
    app = FastAPI(title="citnet session service", version="1")
    sessions: dict[str, SessionEntry] = {}

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request", "detail": str(exc)})

    @app.exception_handler(CitnetError)
    async def engine_error(request: Request, exc: CitnetError):
        if isinstance(exc, UnknownIdError):
            return JSONResponse(status_code=404, content={"error": str(exc)})
        if isinstance(exc, PreconditionError):
            return JSONResponse(status_code=409, content={"error": str(exc)})
        if isinstance(exc, InputFormatError):
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return JSONResponse(status_code=422, content={"error": str(exc)})

    def get_entry(sid: str) -> SessionEntry:
        entry = sessions.get(sid)
        if entry is None:
            raise UnknownIdError(sid, "session")
        return entry

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.format == "wos":
            if not body.wos:
                raise InputFormatError("format 'wos' requires the 'wos' field")
            matched = ingest.match_citations(
                ingest.parse_wos_export(body.wos),
                incomplete_min_citations=body.incomplete_min_citations,
            )
            pubs, edges = matched.publications, matched.edges
        elif body.format == "pairs":
            if body.publications is None or body.citations is None:
                raise InputFormatError("format 'pairs' requires 'publications' and 'citations'")
            pubs, edges = ingest.parse_pair_files(
                io.StringIO(body.publications), io.StringIO(body.citations)
            )
        elif body.format == "archive":
            if not body.archive_b64:
                raise InputFormatError("format 'archive' requires 'archive_b64'")
            entry = _session_from_archive(base64.b64decode(body.archive_b64))
            sid = uuid.uuid4().hex
            sessions[sid] = entry
            return {"session_id": sid, **_state_doc(entry)}
        else:
            raise InputFormatError(f"unknown format: {body.format!r}")
        built = build_network(pubs, edges)
        entry = SessionEntry(session=Session.from_network(built.network))
        sid = uuid.uuid4().hex
        sessions[sid] = entry
        return {
            "session_id": sid,
            "dropped_edges": len(built.dropped),
            **_state_doc(entry),
        }

    @app.get("/v1/sessions/{sid}/state")
    def get_state(sid: str):
        return _state_doc(get_entry(sid))

    @app.get("/v1/sessions/{sid}/publications")
    def list_publications(sid: str, query: Optional[str] = None, offset: int = 0, limit: int = 100):
        entry = get_entry(sid)
        view = entry.session.current
        net = entry.session.network
        if query:
            ids = title_search(view, query)
        else:
            members = view.member_ids
            ids = [p.id for p in net.publications if p.id in members]
        page = ids[offset:offset + limit]
        return {
            "total": len(ids),
            "offset": offset,
            "items": [_pub_doc(entry, pid) for pid in page],
        }

    @app.get("/v1/sessions/{sid}/publications/{pid}")
    def get_publication(sid: str, pid: str):
        entry = get_entry(sid)
        if pid not in entry.session.network:
            raise UnknownIdError(pid)
        return _pub_doc(entry, pid)

    def _pub_doc(entry: SessionEntry, pid: str) -> dict:
        net = entry.session.network
        view = entry.session.current
        p = net.publication(pid)
        return {
            "id": p.id,
            "authors": [p.first_author, *p.co_authors],
            "title": p.title,
            "source": p.source,
            "year": p.year,
            "doi": p.doi,
            "internal_score": net.internal_citations(pid),
            "external_score": p.external_citations if p.external_known else None,
            "complete_record": p.complete_record,
            "member": pid in view.member_ids,
            "marked": pid in view.marked,
            "selected": pid in view.selected,
            "group": view.groups.get(pid),
        }

    @app.get("/v1/sessions/{sid}/frame")
    def get_frame(
        sid: str,
        display_count: int = 40,
        alpha: float = 0.1,
        beta: float = 0.5,
        grid_points: int = 100,
        min_separation: int = 5,
        max_per_layer: int = 10,
        transitive_reduction: bool = False,
        seed: int = 0,
    ):
        entry = get_entry(sid)
        params = LayoutParams(
            display_count=display_count, alpha=alpha, beta=beta,
            grid_points=grid_points, min_separation=min_separation,
            max_per_layer=max_per_layer, use_transitive_reduction=transitive_reduction,
            seed=seed,
        )
        with entry.lock:
            return entry.cached_frame(params)

    @app.post("/v1/sessions/{sid}/mark")
    def mark(sid: str, body: MarkBody):
        entry = get_entry(sid)
        with entry.lock:
            view = entry.session.current.with_marked(body.ids, body.marked)
            entry.session.replace_current(view)
            return _state_doc(entry)

    @app.post("/v1/sessions/{sid}/select")
    def select(sid: str, body: SelectionBody):
        entry = get_entry(sid)
        with entry.lock:
            view = entry.session.current
            resolved = resolve_selection(view, body.to_spec())
            entry.session.replace_current(view.with_selected(resolved, clear_first=True))
            return {"selected": sorted(resolved), **_state_doc(entry)}

    @app.post("/v1/sessions/{sid}/drill")
    def drill(sid: str, body: SelectionBody):
        entry = get_entry(sid)
        with entry.lock:
            drill_down(entry.session, body.to_spec())
            return _state_doc(entry)

    @app.post("/v1/sessions/{sid}/expand")
    def expand_view(sid: str, body: ExpandBody):
        entry = get_entry(sid)
        with entry.lock:
            expand(entry.session, ExpansionSpec(
                add_predecessors=body.add_predecessors,
                add_successors=body.add_successors,
                add_intermediates=body.add_intermediates,
                min_relations=body.min_relations,
            ))
            return _state_doc(entry)

    @app.post("/v1/sessions/{sid}/cluster")
    def cluster_view(sid: str, body: ClusterBody):
        entry = get_entry(sid)
        with entry.lock:
            part = analytics.cluster(
                entry.session.current,
                resolution=body.resolution,
                min_cluster_size=body.min_cluster_size,
                small_cluster_policy=body.policy,
                seed=body.seed,
            )
            view = entry.session.current.with_groups(part.as_dict())
            entry.session.replace_current(view)
            sizes = part.sizes()
            return {
                "clusters": [{"id": c, "size": sizes[c]} for c in sorted(sizes)],
                "quality": part.quality,
                "resolution": part.resolution,
                **_state_doc(entry),
            }

    @app.post("/v1/sessions/{sid}/cores")
    def cores(sid: str, body: CoresBody):
        entry = get_entry(sid)
        with entry.lock:
            core = analytics.core_publications(entry.session.current, body.k)
            if body.action == "mark":
                entry.session.replace_current(
                    entry.session.current.with_marked(core, True)
                )
            elif body.action == "select":
                entry.session.replace_current(
                    entry.session.current.with_selected(core, clear_first=True)
                )
            elif body.action != "none":
                raise ContractError(f"unknown cores action: {body.action!r}")
            return {"core": sorted(core), **_state_doc(entry)}

    @app.post("/v1/sessions/{sid}/path")
    def path(sid: str, body: PathBody):
        entry = get_entry(sid)
        result = analytics.extreme_path(
            entry.session.current, body.from_id, body.to_id, body.kind, body.max_paths
        )
        return {
            "reachable": result.reachable,
            "length": result.length,
            "truncated": result.truncated,
            "paths": [list(p) for p in result.paths],
        }

    @app.post("/v1/sessions/{sid}/back")
    def back(sid: str):
        entry = get_entry(sid)
        with entry.lock:
            moved = history_navigate(entry.session, "back") is not None
            return {"moved": moved, **_state_doc(entry)}

    @app.post("/v1/sessions/{sid}/forward")
    def forward(sid: str):
        entry = get_entry(sid)
        with entry.lock:
            moved = history_navigate(entry.session, "forward") is not None
            return {"moved": moved, **_state_doc(entry)}

    @app.get("/v1/sessions/{sid}/archive")
    def archive(sid: str):
        entry = get_entry(sid)
        with entry.lock:
            payload = _session_to_archive(entry.session)
        return Response(content=payload, media_type="application/zip")

    @app.delete("/v1/sessions/{sid}")
    def delete_session(sid: str):
        get_entry(sid)
        del sessions[sid]
        return {"deleted": sid}

    return app


# -- archive ------------------------------------------------------------------------

def _session_to_archive(session: Session) -> bytes:
    net = session.network
    pubs_io = io.StringIO()
    pubs_io.write("\t".join(ingest.PAIR_PUBLICATIONS_HEADER) + "\n")
    for p in net.publications:
        authors = "; ".join([p.first_author, *p.co_authors]) if p.first_author else ""
        ext = str(p.external_citations) if p.external_known else ""
        pubs_io.write("\t".join([p.id, authors, p.title, p.source, str(p.year), p.doi or "", ext]) + "\n")
    cites_io = io.StringIO()
    cites_io.write("\t".join(ingest.PAIR_CITATIONS_HEADER) + "\n")
    for a, b in net.iter_edges():
        cites_io.write(f"{a}\t{b}\n")

    current = session.current
    attr_io = io.StringIO()
    attr_io.write("id\tmarked\tselected\tgroup\n")
    for pid in sorted(current.member_ids):
        attr_io.write("\t".join([
            pid,
            "1" if pid in current.marked else "0",
            "1" if pid in current.selected else "0",
            str(current.groups[pid]) if pid in current.groups else "",
        ]) + "\n")

    history = {
        "version": ARCHIVE_VERSION,
        "cursor": session.cursor,
        "views": [
            {
                "members": sorted(v.member_ids),
                "marked": sorted(v.marked),
                "selected": sorted(v.selected),
                "groups": dict(sorted(v.groups.items())),
            }
            for v in session.views
        ],
    }
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as z:
        z.writestr("publications.tsv", pubs_io.getvalue())
        z.writestr("citations.tsv", cites_io.getvalue())
        z.writestr("attributes.tsv", attr_io.getvalue())
        z.writestr("history.json", json.dumps(history, indent=2))
    return buf.getvalue()


def _session_from_archive(payload: bytes) -> SessionEntry:
    try:
        z = zipfile.ZipFile(io.BytesIO(payload))
        pubs_text = z.read("publications.tsv").decode("utf-8")
        cites_text = z.read("citations.tsv").decode("utf-8")
        history = json.loads(z.read("history.json").decode("utf-8"))
    except (zipfile.BadZipFile, KeyError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"unreadable session archive: {exc}") from None
    if history.get("version") != ARCHIVE_VERSION:
        raise InputFormatError(f"unsupported archive version: {history.get('version')!r}")
    pubs, edges = ingest.parse_pair_files(io.StringIO(pubs_text), io.StringIO(cites_text))
    net = build_network(pubs, edges).network
    views = []
    for doc in history["views"]:
        views.append(NetworkView(
            network=net,
            member_ids=frozenset(doc["members"]),
            marked=frozenset(doc["marked"]),
            selected=frozenset(doc["selected"]),
            groups={k: int(v) for k, v in doc["groups"].items()},
        ))
    cursor = int(history["cursor"])
    if not views or not (0 <= cursor < len(views)):
        raise InputFormatError("archive history is empty or cursor out of range")
    return SessionEntry(session=Session(network=net, views=views, cursor=cursor))
