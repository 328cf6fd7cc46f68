"""Publication corpus: loading, validation and indexing.

Input files:
  publications.jsonl  one JSON object per line with keys pub_id, year, title,
                      journal_title, mesh_terms, author_addresses, pub_type,
                      oa_status (optional)
  citations.tsv       citing<TAB>cited, no header
  subset.txt          one pub_id per line

Loading is strict about referential integrity: citation edges whose endpoints
are not in the loaded corpus are dropped (and counted), as are self-loops and
duplicate ordered pairs. The resulting Corpus is immutable from the caller's
point of view and safe to share.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import httpx

logger = logging.getLogger(__name__)

PUB_TYPES = ("article", "review")
OA_STATUSES = ("gold", "bronze", "green", "hybrid", "closed", "unknown")

DEFAULT_YEAR_MIN = 1995

# Remote citation fetching
FETCH_BATCH_SIZE = 500
FETCH_MAX_RETRIES = 5
FETCH_BACKOFF_BASE = 0.5  # seconds, doubled per retry


class CorpusError(Exception):
    """Raised for unreadable or malformed corpus inputs in strict mode."""


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    year: int
    title: str = ""
    journal_title: str = ""
    mesh_terms: tuple[str, ...] = ()
    author_addresses: tuple[str, ...] = ()
    pub_type: str = "article"
    oa_status: str = "unknown"


@dataclass(frozen=True)
class CitationEdge:
    citing: str
    cited: str


@dataclass
class LoadReport:
    """Counts of records kept and skipped during a load pass."""

    kept: int = 0
    skipped_year: int = 0
    skipped_type: int = 0
    skipped_malformed: int = 0
    skipped_duplicate_id: int = 0
    # citation-specific
    self_loops: int = 0
    duplicates: int = 0
    dangling: int = 0
    # subset-specific
    unknown_ids: int = 0

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class Corpus:
    publications: dict[str, PublicationRecord] = field(default_factory=dict)
    citations: list[CitationEdge] = field(default_factory=list)
    publication_report: LoadReport = field(default_factory=LoadReport)
    citation_report: LoadReport = field(default_factory=LoadReport)

    def __len__(self) -> int:
        return len(self.publications)

    def pub_ids(self) -> list[str]:
        return sorted(self.publications, key=pub_sort_key)

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self.publications


def pub_sort_key(pub_id: str):
    """Numeric order for digit identifiers (PMIDs), lexicographic otherwise."""
    if pub_id.isdigit():
        return (0, int(pub_id), pub_id)
    return (1, 0, pub_id)


def _parse_record(obj: dict, line_no: int) -> PublicationRecord:
    try:
        pub_id = str(obj["pub_id"])
        year = int(obj["year"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"line {line_no}: missing or invalid pub_id/year ({exc})")
    pub_type = str(obj.get("pub_type", "article")).lower()
    oa = obj.get("oa_status")
    oa_status = str(oa).lower() if oa is not None else "unknown"
    if oa_status not in OA_STATUSES:
        oa_status = "unknown"
    return PublicationRecord(
        pub_id=pub_id,
        year=year,
        title=str(obj.get("title", "") or ""),
        journal_title=str(obj.get("journal_title", "") or ""),
        mesh_terms=tuple(str(t) for t in obj.get("mesh_terms", []) or []),
        author_addresses=tuple(str(a) for a in obj.get("author_addresses", []) or []),
        pub_type=pub_type,
        oa_status=oa_status,
    )


def load_publications(
    path: str | Path,
    year_filter: tuple[int, int] | None = None,
    strict: bool = False,
) -> Corpus:
    """Load publications.jsonl, keeping articles/reviews inside the year window.

    ``year_filter`` is an inclusive (min, max) range; the default window is
    1995 through the current year. In lenient mode (default) malformed lines
    are skipped and counted; strict mode raises on the first bad line.
    """
    path = Path(path)
    if year_filter is None:
        year_filter = (DEFAULT_YEAR_MIN, date.today().year)
    year_min, year_max = year_filter

    report = LoadReport()
    publications: dict[str, PublicationRecord] = {}
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read publications file {path}: {exc}") from exc
    with fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = _parse_record(json.loads(line), line_no)
            except (json.JSONDecodeError, ValueError) as exc:
                if strict:
                    raise CorpusError(f"{path}: {exc}") from exc
                logger.warning("%s: skipping malformed line %d: %s", path, line_no, exc)
                report.skipped_malformed += 1
                continue
            if record.pub_type not in PUB_TYPES:
                report.skipped_type += 1
                continue
            if not (year_min <= record.year <= year_max):
                report.skipped_year += 1
                continue
            if record.pub_id in publications:
                if strict:
                    raise CorpusError(f"{path}: duplicate pub_id {record.pub_id} at line {line_no}")
                report.skipped_duplicate_id += 1
                continue
            publications[record.pub_id] = record
            report.kept += 1

    logger.info(
        "loaded %d publications from %s (skipped: %d year, %d type, %d malformed, %d duplicate)",
        report.kept, path, report.skipped_year, report.skipped_type,
        report.skipped_malformed, report.skipped_duplicate_id,
    )
    return Corpus(publications=publications, publication_report=report)


def load_citations(path: str | Path, corpus: Corpus, strict: bool = False) -> Corpus:
    """Load citations.tsv into ``corpus``, keeping one record per ordered pair.

    Self-loops, duplicate ordered pairs and edges with an endpoint outside the
    loaded publications are dropped and counted in the report.
    """
    path = Path(path)
    report = LoadReport()
    seen: set[tuple[str, str]] = set()
    edges: list[CitationEdge] = []
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read citations file {path}: {exc}") from exc
    with fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                if strict:
                    raise CorpusError(f"{path}: malformed row at line {line_no}: {line!r}")
                logger.warning("%s: skipping malformed row %d", path, line_no)
                report.skipped_malformed += 1
                continue
            citing, cited = parts[0].strip(), parts[1].strip()
            if citing == cited:
                report.self_loops += 1
                continue
            if citing not in corpus.publications or cited not in corpus.publications:
                report.dangling += 1
                continue
            pair = (citing, cited)
            if pair in seen:
                report.duplicates += 1
                continue
            seen.add(pair)
            edges.append(CitationEdge(citing, cited))
            report.kept += 1

    logger.info(
        "loaded %d citation edges from %s (dropped: %d self-loops, %d duplicates, %d dangling)",
        report.kept, path, report.self_loops, report.duplicates, report.dangling,
    )
    return Corpus(
        publications=corpus.publications,
        citations=edges,
        publication_report=corpus.publication_report,
        citation_report=report,
    )


def load_subset(path: str | Path, corpus: Corpus) -> tuple[set[str], LoadReport]:
    """Read one pub_id per line; return the intersection with the corpus."""
    path = Path(path)
    report = LoadReport()
    subset: set[str] = set()
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read subset file {path}: {exc}") from exc
    with fh:
        for line in fh:
            pub_id = line.strip()
            if not pub_id:
                continue
            if pub_id in corpus.publications:
                subset.add(pub_id)
                report.kept += 1
            else:
                report.unknown_ids += 1
    if report.unknown_ids:
        logger.info("subset %s: %d of %d ids unknown to the corpus",
                    path, report.unknown_ids, report.kept + report.unknown_ids)
    return subset, report


def load_metric(path: str | Path) -> dict[str, float]:
    """Read a pub_id<TAB>value metric table; values parsed as floats."""
    path = Path(path)
    metric: dict[str, float] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{path}: malformed metric row at line {line_no}")
            try:
                metric[parts[0].strip()] = float(parts[1])
            except ValueError as exc:
                raise CorpusError(f"{path}: bad metric value at line {line_no}") from exc
    return metric


def fetch_citations_remote(
    id_list: set[str] | list[str],
    endpoint: str,
    out_path: str | Path,
    rate_limit: float = 3.0,
    batch_size: int = FETCH_BATCH_SIZE,
    client: httpx.Client | None = None,
    journal_path: str | Path | None = None,
) -> int:
    """Fetch citation links for ``id_list`` and append them to ``out_path``.

    The endpoint is queried with GET ?ids=<comma-separated batch> and must
    return JSON of the form {"links": [{"citing": ..., "cited": ...}, ...]}.
    Batches already recorded in the progress journal are skipped, so an
    interrupted run can resume. Returns the number of edges written.
    """
    out_path = Path(out_path)
    journal_path = Path(journal_path) if journal_path else out_path.with_suffix(".journal")
    ids = sorted({str(i) for i in id_list}, key=pub_sort_key)
    if not ids:
        return 0

    done: set[int] = set()
    if journal_path.exists():
        done = {int(x) for x in journal_path.read_text().split() if x.strip()}

    own_client = client is None
    if own_client:
        client = httpx.Client(timeout=30.0)
    min_interval = 1.0 / rate_limit if rate_limit > 0 else 0.0
    written = 0
    last_request = 0.0
    try:
        with out_path.open("a", encoding="utf-8") as out, \
                journal_path.open("a", encoding="utf-8") as journal:
            for batch_no, start in enumerate(range(0, len(ids), batch_size)):
                if batch_no in done:
                    continue
                batch = ids[start:start + batch_size]
                wait = min_interval - (time.monotonic() - last_request)
                if wait > 0:
                    time.sleep(wait)
                payload = _request_with_retry(client, endpoint, batch)
                last_request = time.monotonic()
                if payload is None:
                    logger.warning("batch %d: skipped after repeated failures", batch_no)
                    continue
                for link in payload.get("links", []):
                    try:
                        out.write(f"{link['citing']}\t{link['cited']}\n")
                        written += 1
                    except (KeyError, TypeError):
                        logger.warning("batch %d: malformed link entry skipped", batch_no)
                journal.write(f"{batch_no}\n")
                journal.flush()
    finally:
        if own_client:
            client.close()
    return written


def _request_with_retry(client: httpx.Client, endpoint: str, batch: list[str]) -> dict | None:
    delay = FETCH_BACKOFF_BASE
    for attempt in range(FETCH_MAX_RETRIES):
        try:
            resp = client.get(endpoint, params={"ids": ",".join(batch)})
            if resp.status_code == 429 or resp.status_code >= 500:
                raise httpx.HTTPStatusError("retryable", request=resp.request, response=resp)
            resp.raise_for_status()
            return resp.json()
        except (httpx.HTTPError, json.JSONDecodeError) as exc:
            if attempt == FETCH_MAX_RETRIES - 1:
                logger.error("giving up on batch after %d attempts: %s", FETCH_MAX_RETRIES, exc)
                return None
            logger.warning("request failed (%s), retrying in %.1fs", exc, delay)
            time.sleep(delay)
            delay *= 2
    return None
