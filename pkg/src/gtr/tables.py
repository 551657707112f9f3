"""Table-aware retrieval: profile a database, embed its tables, pick the
relevant ones for a question, prompt for SQL, and execute it read-only.

Databases are SQLite files (the layout used by multi-database text-to-SQL
benchmarks). Execution opens the file in read-only mode AND rejects any
statement whose keywords include a write or DDL verb, so a run can never
mutate the database.

SQL prompt template (bit-exact), one block per selected table in score
order, then the question::

    Table {name}({col1 type1, col2 type2, ...})\\n{csv}\\n\\n ... Question: {query}\\nSQL:

where {csv} is the table's sample CSV without its final newline.
"""

from __future__ import annotations

import csv
import io
import re
import sqlite3
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .embedding import EmbedderConfig, embed, fingerprint
from .errors import (
    DbUnreadable,
    EmptyGeneration,
    EmptySelection,
    FingerprintMismatch,
    GtrError,
    InvalidInput,
    NonReadStatement,
    QueryTimeout,
    SqlError,
    StageError,
)
from .llm import Completion, LlmConfig, complete
from .pipeline import Query
from .store import VectorRecord, VectorStore

DEFAULT_SAMPLE_LIMIT = 5
DEFAULT_ROW_LIMIT = 1000
DEFAULT_TIMEOUT_MS = 10_000
DEFAULT_TABLE_K = 3


@dataclass
class TableProfile:
    db_id: str
    name: str
    columns: list[tuple[str, str]]
    row_count: int
    sample_rows: list[tuple]
    csv: str


@dataclass(frozen=True)
class SqlQuery:
    text: str
    dialect: str = "sqlite"

    def __post_init__(self):
        if not self.text.strip():
            raise InvalidInput("sql text must be nonempty")


@dataclass
class ResultSet:
    columns: list[str]
    rows: list[tuple]
    truncated: bool = False


@dataclass
class TabularTrace:
    query: str
    selected: list[tuple[str, float]] = field(default_factory=list)
    prompt: str | None = None
    completion: Completion | None = None
    sql: str | None = None
    error: tuple[str, str] | None = None  # (stage, message)

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "selected": [[tid, score] for tid, score in self.selected],
            "prompt": self.prompt,
            "sql": self.sql,
            "completion": None
            if self.completion is None
            else {
                "text": self.completion.text,
                "prompt_tokens": self.completion.prompt_tokens,
                "completion_tokens": self.completion.completion_tokens,
                "latency_ms": self.completion.latency_ms,
            },
            "error": None if self.error is None else list(self.error),
        }


@dataclass
class TabularAnswer:
    sql: SqlQuery
    result: ResultSet
    trace: TabularTrace


def _quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def _connect_readonly(db_path: str | Path) -> sqlite3.Connection:
    path = Path(db_path)
    if not path.is_file():
        raise DbUnreadable(f"database file not found: {path}")
    try:
        conn = sqlite3.connect(f"file:{path.as_posix()}?mode=ro", uri=True)
        conn.execute("SELECT 1 FROM sqlite_master LIMIT 1").fetchall()
    except sqlite3.Error as e:
        raise DbUnreadable(f"cannot open {path}: {e}")
    return conn


def profile_tables(
    db_path: str | Path, sample_limit: int = DEFAULT_SAMPLE_LIMIT
) -> list[TableProfile]:
    """One profile per user table, columns in schema order, in the order
    tables are stored in the catalog. Internal sqlite_* tables are skipped."""
    if sample_limit < 0:
        raise InvalidInput("sample_limit must be nonnegative")
    db_id = Path(db_path).stem
    conn = _connect_readonly(db_path)
    try:
        names = [
            row[0]
            for row in conn.execute(
                "SELECT name FROM sqlite_master WHERE type='table' "
                "AND name NOT LIKE 'sqlite_%'"
            )
        ]
        profiles = []
        for name in names:
            columns = [
                (str(row[1]), str(row[2]))
                for row in conn.execute(f"PRAGMA table_info({_quote_ident(name)})")
            ]
            row_count = conn.execute(
                f"SELECT COUNT(*) FROM {_quote_ident(name)}"
            ).fetchone()[0]
            sample_rows = [
                tuple(row)
                for row in conn.execute(
                    f"SELECT * FROM {_quote_ident(name)} LIMIT ?", (sample_limit,)
                )
            ]
            profiles.append(
                TableProfile(
                    db_id=db_id,
                    name=name,
                    columns=columns,
                    row_count=row_count,
                    sample_rows=sample_rows,
                    csv=serialize_table_csv(columns, sample_rows),
                )
            )
        return profiles
    finally:
        conn.close()


def serialize_table_csv(
    columns: Sequence[tuple[str, str]], rows: Sequence[tuple]
) -> str:
    """RFC-4180-style CSV: header of column names, then the sample rows.

    Fields containing commas, quotes, or newlines are double-quoted with
    quote doubling; lines end with "\\n"; NULLs render as empty fields.
    """
    if not columns:
        raise InvalidInput("cannot serialize a table with no columns")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([name for name, _ in columns])
    for row in rows:
        writer.writerow(row)
    return out.getvalue()


def table_record_id(db_id: str, name: str) -> str:
    return f"{db_id}.{name}"


def embedding_text(profile: TableProfile) -> str:
    """The text embedded for one table: name, column list, CSV sample."""
    names = ", ".join(name for name, _ in profile.columns)
    return f"table: {profile.name}\ncolumns: {names}\n{profile.csv}"


def index_tables(
    profiles: Sequence[TableProfile],
    embedder_config: EmbedderConfig | None = None,
    store_path: str | Path | None = None,
) -> VectorStore:
    """Embed one record per table into a new store (id ``<db_id>.<name>``)."""
    if not profiles:
        raise InvalidInput("need at least one table profile to index")
    embedder_config = embedder_config or EmbedderConfig()
    store = VectorStore(embedder_config.dim, fingerprint(embedder_config))
    for profile in profiles:
        text = embedding_text(profile)
        store.insert(
            VectorRecord(
                id=table_record_id(profile.db_id, profile.name),
                vector=embed(text, embedder_config),
                kind="table",
                text=text,
                metadata={"db_id": profile.db_id, "name": profile.name},
            )
        )
    if store_path is not None:
        store.save(store_path)
    return store


def select_tables(
    query: Query,
    store: VectorStore,
    k: int = DEFAULT_TABLE_K,
    *,
    embedder_config: EmbedderConfig | None = None,
) -> list[tuple[str, float]]:
    """Top-k table record ids with scores, by exact cosine over the store."""
    embedder_config = embedder_config or EmbedderConfig()
    if len(store) == 0:
        raise InvalidInput("table store is empty")
    for record in store.records:
        if record.kind != "table":
            raise InvalidInput(
                f"store contains a non-table record {record.id!r}; "
                "index tables into their own store"
            )
    expected = fingerprint(embedder_config)
    if store.embedder_fingerprint != expected:
        raise FingerprintMismatch(
            f"store embedder {store.embedder_fingerprint!r} != configured {expected!r}"
        )
    return store.query_top_k(embed(query.text, embedder_config), k)


def compose_sql_prompt(selected: Sequence[TableProfile], query: Query) -> str:
    """Instantiate the SQL prompt template over the selected tables."""
    if not selected:
        raise EmptySelection("sql prompt needs at least one table")
    blocks = []
    for profile in selected:
        cols = ", ".join(
            f"{name} {ctype}" if ctype else name for name, ctype in profile.columns
        )
        body = profile.csv.removesuffix("\n")
        blocks.append(f"Table {profile.name}({cols})\n{body}\n\n")
    return "".join(blocks) + f"Question: {query.text}\nSQL:"


_FENCE_RE = re.compile(r"```[\w+-]*\n(.*?)```", re.DOTALL)


def extract_sql(completion_text: str) -> str:
    """Trim a completion to its first SQL statement.

    Code fences are stripped, then everything after the first ";" dropped.

    Raises:
        EmptyGeneration: nothing remains.
    """
    text = completion_text.strip()
    fenced = _FENCE_RE.search(text)
    if fenced:
        text = fenced.group(1).strip()
    statement = text.split(";", 1)[0].strip()
    if not statement:
        raise EmptyGeneration("completion contained no SQL statement")
    return statement


def generate_sql(prompt: str, llm_config: LlmConfig | None = None) -> SqlQuery:
    return SqlQuery(extract_sql(complete(prompt, llm_config).text))


# Keywords that can only belong to a mutating or schema-changing statement.
_WRITE_KEYWORDS = frozenset(
    """insert update delete drop create alter replace attach detach pragma
    vacuum reindex analyze begin commit rollback savepoint release""".split()
)

# Statement-initial keywords of valid non-SELECT statements; anything else
# unrecognized is left to the engine so typos surface as SqlError.
_NON_SELECT_STARTERS = _WRITE_KEYWORDS | {"explain", "values"}

_SQL_WORD_RE = re.compile(r"[A-Za-z_]\w*")


def _statement_keywords(sql: str) -> list[str]:
    """Lowercased word tokens outside string/identifier quotes and comments."""
    words = []
    i, n = 0, len(sql)
    while i < n:
        c = sql[i]
        if c == "'" or c == '"' or c == "`":
            quote = c
            i += 1
            while i < n:
                if sql[i] == quote:
                    if i + 1 < n and sql[i + 1] == quote:  # doubled quote escape
                        i += 2
                        continue
                    break
                i += 1
            i += 1
        elif c == "[":
            end = sql.find("]", i + 1)
            i = n if end < 0 else end + 1
        elif sql.startswith("--", i):
            end = sql.find("\n", i)
            i = n if end < 0 else end + 1
        elif sql.startswith("/*", i):
            end = sql.find("*/", i + 2)
            i = n if end < 0 else end + 2
        else:
            m = _SQL_WORD_RE.match(sql, i)
            if m:
                words.append(m.group().lower())
                i = m.end()
            else:
                i += 1
    return words


def assert_read_only(sql: str) -> None:
    """Reject anything but a SELECT (or WITH ... SELECT) statement.

    The database file is additionally opened read-only, so even a statement
    that slips past this keyword screen cannot mutate anything.
    """
    words = _statement_keywords(sql)
    if not words:
        raise NonReadStatement("statement is empty")
    if words[0] in _NON_SELECT_STARTERS:
        raise NonReadStatement(f"only SELECT statements may run, got {words[0]!r}")
    offending = _WRITE_KEYWORDS.intersection(words)
    if offending:
        raise NonReadStatement(
            f"statement contains write keyword {sorted(offending)[0]!r}"
        )


def execute_sql(
    sql: SqlQuery | str,
    db_path: str | Path,
    *,
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    row_limit: int | None = DEFAULT_ROW_LIMIT,
) -> ResultSet:
    """Run a read statement; rows come back in engine order.

    Results are truncated at row_limit (flag set on the ResultSet);
    row_limit=None disables truncation.

    Raises:
        NonReadStatement: statement is not SELECT-class.
        SqlError: the engine rejected the statement (engine message kept).
        QueryTimeout: execution exceeded timeout_ms.
        DbUnreadable: missing or unopenable database file.
    """
    text = sql.text if isinstance(sql, SqlQuery) else sql
    assert_read_only(text)
    conn = _connect_readonly(db_path)
    deadline = time.monotonic() + timeout_ms / 1000.0
    conn.set_progress_handler(lambda: 1 if time.monotonic() > deadline else 0, 5000)
    try:
        cursor = conn.execute(text)
        if row_limit is None:
            rows = [tuple(r) for r in cursor.fetchall()]
            truncated = False
        else:
            rows = [tuple(r) for r in cursor.fetchmany(row_limit)]
            truncated = cursor.fetchone() is not None
        columns = [d[0] for d in cursor.description] if cursor.description else []
        return ResultSet(columns=columns, rows=rows, truncated=truncated)
    except sqlite3.OperationalError as e:
        if "interrupt" in str(e).lower():
            raise QueryTimeout(f"statement exceeded {timeout_ms} ms")
        raise SqlError(str(e))
    except sqlite3.Error as e:
        raise SqlError(str(e))
    finally:
        conn.close()


def answer_tabular(
    query: Query,
    db_path: str | Path,
    store: VectorStore,
    *,
    k: int = DEFAULT_TABLE_K,
    embedder_config: EmbedderConfig | None = None,
    llm_config: LlmConfig | None = None,
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    row_limit: int | None = DEFAULT_ROW_LIMIT,
) -> TabularAnswer:
    """Select tables, prompt for SQL, execute it, and return the full trace.

    A stage failure raises StageError carrying the stage name and the
    partial trace (with trace.error set); the original error is chained.

    Raises:
        InvalidInput: store not indexed from this database.
        StageError: any stage failed.
    """
    db_id = Path(db_path).stem
    profiles = {p.name: p for p in profile_tables(db_path)}
    for record in store.records:
        if record.metadata.get("db_id") != db_id:
            raise InvalidInput(
                f"store record {record.id!r} was not indexed from database {db_id!r}"
            )

    trace = TabularTrace(query=query.text)

    def fail(stage: str, error: GtrError):
        trace.error = (stage, str(error))
        raise StageError(stage, error, trace) from error

    try:
        trace.selected = select_tables(query, store, k, embedder_config=embedder_config)
    except GtrError as e:
        fail("select_tables", e)

    selected_profiles = []
    for table_id, _ in trace.selected:
        name = store.get(table_id).metadata["name"]
        if name in profiles:
            selected_profiles.append(profiles[name])
    try:
        trace.prompt = compose_sql_prompt(selected_profiles, query)
    except GtrError as e:
        fail("compose_sql_prompt", e)

    try:
        trace.completion = complete(trace.prompt, llm_config)
        trace.sql = extract_sql(trace.completion.text)
    except GtrError as e:
        fail("generate_sql", e)

    sql = SqlQuery(trace.sql)
    try:
        result = execute_sql(sql, db_path, timeout_ms=timeout_ms, row_limit=row_limit)
    except GtrError as e:
        fail("execute_sql", e)

    return TabularAnswer(sql=sql, result=result, trace=trace)
