"""In-memory HTTP session service for interactive game play.

One session is one game: the human plays one side, the engine plays the
other (choosing moves with the bounded solver), and every deterministic
step is auto-applied and recorded.  Sessions live in memory only and
expire after an idle timeout.  All endpoints speak JSON; responses are
serialized with sorted keys so identical states are byte-identical.
"""

from __future__ import annotations

import itertools
import json
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .game import (
    GameConfig,
    Move,
    Position,
    Role,
    Terminal,
    apply_move,
    describe_move,
    initial_position,
    legal_moves,
    move_to_dict,
    mover_player,
    position_hash,
)
from .solver import best_move_index, solve_bounded_position
from .structure import PartialStructure, parse_model
from .syntax import (
    EMPTY_VOCABULARY,
    FormulaTable,
    ParseError,
    index_subformulas,
    parse_formula,
    print_with_spans,
)
from .structure import ModelFormatError

# Engine/auto stepping cap per request, so a game where the human never
# gets a turn (both sides forced or engine-run forever) stays responsive.
MAX_ADVANCE_STEPS = 64

DEFAULT_IDLE_TTL = 30 * 60.0


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    id: str
    table: FormulaTable
    config: GameConfig
    human: Role
    engine_budget: int
    position: Position
    history: list = field(default_factory=list)
    terminal: str | None = None
    choices: list = field(default_factory=list)
    engine_pending: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)

    def advance(self):
        """Apply forced steps and engine moves until the human is on turn,
        the play ends, or the per-request step cap is reached."""
        self.engine_pending = False
        for _ in range(MAX_ADVANCE_STEPS):
            moves = legal_moves(self.position, self.table, self.config)
            if isinstance(moves, Terminal):
                self.terminal = moves.winner.value
                self.choices = []
                return
            mover = mover_player(moves, self.position.verifier)
            if mover is None:
                self._step(moves[0], "auto", None)
                continue
            if mover is self.human:
                self.choices = moves
                return
            idx, _basis = best_move_index(self.position, self.table,
                                          self.engine_budget, self.config)
            self._step(moves[idx], "engine", mover)
        self.choices = []
        self.engine_pending = True

    def _step(self, move: Move, by: str, player: Role | None):
        self.position = apply_move(self.position, move, self.table, self.config)
        self.history.append({
            "by": by,
            "player": player.value if player else None,
            "move": move_to_dict(move),
            "position": position_hash(self.position, self.table),
        })

    def submit(self, choice_index: int):
        if self.terminal is not None:
            raise ApiError(409, "the play has already ended")
        if not self.choices:
            raise ApiError(409, "it is not the human player's turn")
        if not isinstance(choice_index, int) or not 0 <= choice_index < len(self.choices):
            raise ApiError(400, f"choiceIndex must be in 0..{len(self.choices) - 1}")
        self._step(self.choices[choice_index], "human", self.human)
        self.choices = []
        self.advance()


def _position_payload(session: Session) -> dict:
    p = session.position
    s = p.structure
    text, spans = print_with_spans(session.table)
    start, end = spans[p.node]
    relations = {}
    for name, rt in s.relations.items():
        tuples = []
        for tup in itertools.product(s.domain, repeat=rt.arity):
            tuples.append({"elems": list(tup), "status": s.rel_status(name, tup).value})
        relations[name] = {"arity": rt.arity, "mode": "total" if rt.total else "partial",
                           "tuples": tuples}
    functions = {
        name: {"arity": ft.arity,
               "entries": [{"args": list(args), "value": val} for args, val in ft.entries]}
        for name, ft in s.functions.items()
    }
    return {
        "hash": position_hash(p, session.table),
        "domain": list(s.domain),
        "relations": relations,
        "functions": functions,
        "constants": dict(s.constants),
        "assignment": dict(p.assignment),
        "formulaText": text,
        "activeRange": [start, end],
        "activeText": text[start:end],
        "nodeId": p.node,
        "verifier": p.verifier.value,
    }


def _choices_payload(session: Session) -> list[dict]:
    out = []
    for i, m in enumerate(session.choices):
        d = move_to_dict(m)
        out.append({
            "index": i,
            "mover": d["mover"],
            "player": session.human.value,
            "label": describe_move(m, session.table, session.position),
            "move": d,
        })
    return out


def _state_payload(session: Session) -> dict:
    return {
        "id": session.id,
        "position": _position_payload(session),
        "choices": _choices_payload(session),
        "history": list(session.history),
        "terminal": session.terminal,
        "enginePending": session.engine_pending,
    }


class SessionStore:
    def __init__(self, idle_ttl: float = DEFAULT_IDLE_TTL):
        self.sessions: dict[str, Session] = {}
        self.idle_ttl = idle_ttl
        self.lock = threading.Lock()

    def purge(self):
        now = time.monotonic()
        with self.lock:
            dead = [sid for sid, s in self.sessions.items()
                    if now - s.last_access > self.idle_ttl]
            for sid in dead:
                del self.sessions[sid]

    def create(self, body: dict) -> Session:
        formula_text = body.get("formula")
        if not isinstance(formula_text, str):
            raise ApiError(400, "missing 'formula'")
        model_text = body.get("model")
        role = body.get("humanRole", "eloise")
        if role not in ("eloise", "abelard"):
            raise ApiError(400, "humanRole must be 'eloise' or 'abelard'")
        cfg = body.get("config") or {}
        if cfg.get("freshStatus", "undefined") not in ("undefined", "negative"):
            raise ApiError(400, "freshStatus must be 'undefined' or 'negative'")
        config = GameConfig(
            delete_miss=cfg.get("deleteMiss", "lose"),
            claim_unbound=cfg.get("claimUnbound", "neither"),
            fresh_negative=cfg.get("freshStatus", "undefined") == "negative",
        )
        if config.delete_miss not in ("lose", "ignore"):
            raise ApiError(400, "deleteMiss must be 'lose' or 'ignore'")
        if config.claim_unbound not in ("neither", "lose"):
            raise ApiError(400, "claimUnbound must be 'neither' or 'lose'")
        engine_budget = cfg.get("engineBudget", 6)
        if not isinstance(engine_budget, int) or engine_budget < 1:
            raise ApiError(400, "engineBudget must be a positive integer")
        if model_text:
            try:
                vocab, structure = parse_model(model_text)
            except ModelFormatError as e:
                raise ApiError(400, f"model: {e}")
        else:
            vocab, structure = EMPTY_VOCABULARY, PartialStructure()
        try:
            formula = parse_formula(formula_text, vocab)
        except ParseError as e:
            raise ApiError(400, f"formula: {e}")
        table = index_subformulas(formula)
        session = Session(
            id=uuid.uuid4().hex,
            table=table,
            config=config,
            human=Role(role),
            engine_budget=engine_budget,
            position=initial_position(structure, {}, table),
        )
        session.advance()
        with self.lock:
            self.sessions[session.id] = session
        return session

    def get(self, sid: str) -> Session:
        with self.lock:
            session = self.sessions.get(sid)
        if session is None:
            raise ApiError(404, f"no session {sid!r}")
        session.last_access = time.monotonic()
        return session

    def delete(self, sid: str):
        with self.lock:
            if sid not in self.sessions:
                raise ApiError(404, f"no session {sid!r}")
            del self.sessions[sid]


_SESSION_PATH = re.compile(r"^/api/session/([0-9a-f]{32})(/move|/hint)?$")


def make_handler(store: SessionStore):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):  # quiet by default
            pass

        def _send(self, status: int, payload: dict | None):
            body = b"" if payload is None else json.dumps(
                payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            if body:
                self.wfile.write(body)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                parsed = json.loads(raw)
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON")
            if not isinstance(parsed, dict):
                raise ApiError(400, "request body must be a JSON object")
            return parsed

        def _route(self, method: str):
            store.purge()
            if self.path == "/api/session" and method == "POST":
                session = store.create(self._body())
                return 200, _state_payload(session)
            m = _SESSION_PATH.match(self.path)
            if not m:
                raise ApiError(404, f"no route {method} {self.path}")
            session = store.get(m.group(1))
            sub = m.group(2)
            if sub is None and method == "GET":
                return 200, _state_payload(session)
            if sub is None and method == "DELETE":
                store.delete(session.id)
                return 204, None
            if sub == "/move" and method == "POST":
                body = self._body()
                if not session.lock.acquire(blocking=False):
                    raise ApiError(409, "another move submission is in flight")
                try:
                    before = len(session.history)
                    if "choiceIndex" in body and body["choiceIndex"] is not None:
                        session.submit(body["choiceIndex"])
                    else:
                        if session.terminal is None and not session.choices:
                            session.advance()
                        else:
                            raise ApiError(400, "choiceIndex is required when it is your turn")
                    payload = _state_payload(session)
                    payload["engineReply"] = session.history[before:]
                    return 200, payload
                finally:
                    session.lock.release()
            if sub == "/hint" and method == "POST":
                body = self._body()
                budget = body.get("budget", 6)
                if not isinstance(budget, int) or budget < 1:
                    raise ApiError(400, "budget must be a positive integer")
                verdict = solve_bounded_position(session.position, session.table,
                                                 budget, session.config)
                suggested = None
                basis = None
                if session.choices and session.terminal is None:
                    suggested, basis = best_move_index(
                        session.position, session.table, budget, session.config)
                return 200, {
                    "verdict": verdict.outcome.value,
                    "depth": verdict.depth,
                    "budgetUsed": verdict.budget_used,
                    "suggestedChoice": suggested,
                    "basis": basis,
                }
            raise ApiError(404, f"no route {method} {self.path}")

        def _handle(self, method: str):
            try:
                status, payload = self._route(method)
            except ApiError as e:
                status, payload = e.status, {"error": e.message}
            except Exception as e:  # defensive: report, do not kill the thread
                status, payload = 500, {"error": f"internal error: {e}"}
            self._send(status, payload)

        def do_GET(self):
            self._handle("GET")

        def do_POST(self):
            self._handle("POST")

        def do_DELETE(self):
            self._handle("DELETE")

        def do_OPTIONS(self):
            self._send(204, None)

    return Handler


def make_server(host: str = "127.0.0.1", port: int = 8750,
                idle_ttl: float = DEFAULT_IDLE_TTL) -> ThreadingHTTPServer:
    store = SessionStore(idle_ttl)
    server = ThreadingHTTPServer((host, port), make_handler(store))
    server.daemon_threads = True
    server.store = store  # handy for tests and embedding
    return server


def run_server(host: str = "127.0.0.1", port: int = 8750,
               idle_ttl: float = DEFAULT_IDLE_TTL):
    server = make_server(host, port, idle_ttl)
    try:
        server.serve_forever()
    finally:
        server.server_close()
