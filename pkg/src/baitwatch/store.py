"""Append-only persistence shared by all pipeline stages.

One event-log file per month (`probes-YYYY-MM.log`), newline-delimited
records `day|url|vantage|status|reason`. Everything else (uptime indexes,
per-domain spans) is derived in memory on open and can be dumped to
disposable index files. Single writer; readers see a consistent snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from urllib.parse import quote, unquote

from .errors import DuplicateEvent, NoOnlineObservation, OutOfOrderDay, UnknownUrl
from .netmeta.urlsplit import split_url

ONLINE = "online"
OFFLINE = "offline"


@dataclass(frozen=True)
class ProbeEvent:
    url: str
    day: date
    status: str              # ONLINE | OFFLINE
    vantage: str
    reason: str = ""         # populated for OFFLINE events

    def __post_init__(self):
        if self.status not in (ONLINE, OFFLINE):
            raise ValueError(f"bad status {self.status!r}")


@dataclass(frozen=True)
class DatasetEntry:
    sha256: str
    source: str              # "seed" | "extracted"
    first_seen: date
    seo_verdict: bool


def _field(value: str) -> str:
    # '|' and newlines are the record delimiters
    return quote(value, safe=":/?#[]@!$&'()*+,;=~.- ")


class EventStore:
    def __init__(self, root, etld1_of=None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._etld1_of = etld1_of or _default_etld1
        # derived indexes
        self._seen: set = set()          # (url, day, vantage)
        self._last_day: dict = {}        # (url, vantage) -> date
        self._online_days: dict = {}     # url -> set of dates
        self._all_days: dict = {}        # url -> set of dates
        self._etld1_urls: dict = {}      # etld1 -> set of urls
        self._etld1_cache: dict = {}     # url -> etld1 (or None)
        self._dataset: dict = {}         # sha256 -> DatasetEntry
        self._urls: dict = {}            # url -> first_seen date
        self._handles: dict = {}         # month log path -> open handle
        self._replay()

    # --- log plumbing ---

    def _log_path(self, day: date) -> Path:
        return self.root / f"probes-{day.strftime('%Y-%m')}.log"

    def _replay(self) -> None:
        for path in sorted(self.root.glob("probes-*.log")):
            for line in path.read_text().splitlines():
                if line:
                    self._index(self._parse_line(line))
        dataset = self.root / "dataset.log"
        if dataset.exists():
            for line in dataset.read_text().splitlines():
                if not line:
                    continue
                first_seen, sha, source, verdict = line.split("|")
                self._dataset[sha] = DatasetEntry(
                    sha256=sha, source=source,
                    first_seen=date.fromisoformat(first_seen),
                    seo_verdict=verdict == "1",
                )
        urls = self.root / "urls.log"
        if urls.exists():
            for line in urls.read_text().splitlines():
                if not line:
                    continue
                # later lines are renewals and supersede the original entry
                first_seen, url = line.split("|", 1)
                self._urls[unquote(url)] = date.fromisoformat(first_seen)

    @staticmethod
    def _parse_line(line: str) -> ProbeEvent:
        day, url, vantage, status, reason = line.split("|")
        return ProbeEvent(url=unquote(url), day=date.fromisoformat(day),
                          status=status, vantage=unquote(vantage),
                          reason=unquote(reason))

    def _index(self, event: ProbeEvent) -> None:
        self._seen.add((event.url, event.day, event.vantage))
        self._last_day[(event.url, event.vantage)] = event.day
        self._all_days.setdefault(event.url, set()).add(event.day)
        if event.status == ONLINE:
            self._online_days.setdefault(event.url, set()).add(event.day)
        else:
            self._online_days.setdefault(event.url, set())
        if event.url not in self._etld1_cache:
            try:
                self._etld1_cache[event.url] = self._etld1_of(event.url)
            except Exception:
                self._etld1_cache[event.url] = None
        etld1 = self._etld1_cache[event.url]
        if etld1:
            self._etld1_urls.setdefault(etld1, set()).add(event.url)

    # --- probe events ---

    def append_probe(self, event: ProbeEvent) -> None:
        key = (event.url, event.day, event.vantage)
        if key in self._seen:
            raise DuplicateEvent(f"{event.url} {event.day} {event.vantage}")
        last = self._last_day.get((event.url, event.vantage))
        if last is not None and event.day < last:
            raise OutOfOrderDay(f"{event.url}: {event.day} after {last}")
        line = "|".join((
            event.day.isoformat(), _field(event.url), _field(event.vantage),
            event.status, _field(event.reason),
        ))
        path = self._log_path(event.day)
        handle = self._handles.get(path)
        if handle is None:
            handle = self._handles[path] = open(path, "a")
        handle.write(line + "\n")
        handle.flush()
        self._index(event)

    def close(self) -> None:
        for handle in self._handles.values():
            handle.close()
        self._handles.clear()

    def uptime_days(self, url: str) -> int:
        """Distinct days with at least one Online event from any vantage."""
        if url not in self._all_days:
            raise UnknownUrl(url)
        return len(self._online_days.get(url, ()))

    def extended_lifetime(self, etld1: str) -> int:
        """Span in days from first to last Online event of any URL under etld1."""
        days: set = set()
        for url in self._etld1_urls.get(etld1, ()):
            days |= self._online_days.get(url, set())
        if not days:
            raise NoOnlineObservation(etld1)
        return (max(days) - min(days)).days + 1

    def day_status(self, url: str, day: date) -> str | None:
        """Collapsed multi-vantage verdict: Online if any vantage saw Online."""
        if url not in self._all_days or day not in self._all_days[url]:
            return None
        return ONLINE if day in self._online_days.get(url, ()) else OFFLINE

    def days_for(self, url: str):
        return sorted(self._all_days.get(url, ()))

    def urls(self):
        return sorted(self._all_days)

    def urls_under(self, etld1: str):
        return sorted(self._etld1_urls.get(etld1, ()))

    def etld1s(self):
        return sorted(self._etld1_urls)

    def has_events(self, day: date) -> bool:
        return any(day in days for days in self._all_days.values())

    # --- dataset entries ---

    def add_dataset_entry(self, entry: DatasetEntry) -> DatasetEntry:
        """Record a parsed document; duplicate digests keep the first entry."""
        existing = self._dataset.get(entry.sha256)
        if existing is not None:
            return existing
        line = "|".join((
            entry.first_seen.isoformat(), entry.sha256, entry.source,
            "1" if entry.seo_verdict else "0",
        ))
        with open(self.root / "dataset.log", "a") as fh:
            fh.write(line + "\n")
        self._dataset[entry.sha256] = entry
        return entry

    def dataset_entries(self):
        return [self._dataset[k] for k in sorted(self._dataset)]

    # --- monitored-url registry ---

    def register_url(self, url: str, first_seen: date) -> bool:
        if url in self._urls:
            return False
        with open(self.root / "urls.log", "a") as fh:
            fh.write(f"{first_seen.isoformat()}|{_field(url)}\n")
        self._urls[url] = first_seen
        return True

    def renew_url(self, url: str, seen_again: date) -> None:
        """Re-register a retired URL observed via a new backlink: monitoring
        restarts with fresh state while the old history stays queryable."""
        with open(self.root / "urls.log", "a") as fh:
            fh.write(f"{seen_again.isoformat()}|{_field(url)}\n")
        self._urls[url] = seen_again

    def registered_urls(self) -> dict:
        return dict(self._urls)

    # --- sidecar tables for other stages ---

    def append_record(self, kind: str, payload: dict) -> None:
        with open(self.root / f"{kind}.jsonl", "a") as fh:
            fh.write(json.dumps(payload, sort_keys=True, default=str) + "\n")

    def iter_records(self, kind: str):
        path = self.root / f"{kind}.jsonl"
        if not path.exists():
            return
        for line in path.read_text().splitlines():
            if line:
                yield json.loads(line)

    def has_record(self, kind: str, **match) -> bool:
        return any(
            all(rec.get(k) == v for k, v in match.items())
            for rec in self.iter_records(kind)
        )

    # --- derived index files (disposable) ---

    def write_indexes(self) -> Path:
        index_dir = self.root / "index"
        index_dir.mkdir(exist_ok=True)
        lines = []
        for url in self.urls():
            days = self.days_for(url)
            online = sorted(self._online_days.get(url, ()))
            lines.append("\t".join((
                url, str(len(online)),
                online[0].isoformat() if online else "-",
                online[-1].isoformat() if online else "-",
                days[-1].isoformat(),
            )))
        (index_dir / "uptime.tsv").write_text("\n".join(lines) + ("\n" if lines else ""))
        span_lines = []
        for etld1 in self.etld1s():
            try:
                span = self.extended_lifetime(etld1)
            except NoOnlineObservation:
                span = 0
            span_lines.append(f"{etld1}\t{span}")
        (index_dir / "lifetime.tsv").write_text(
            "\n".join(span_lines) + ("\n" if span_lines else ""))
        ds_lines = [
            "\t".join((e.sha256, e.source, e.first_seen.isoformat(),
                       "1" if e.seo_verdict else "0"))
            for e in self.dataset_entries()
        ]
        (index_dir / "dataset.tsv").write_text(
            "\n".join(ds_lines) + ("\n" if ds_lines else ""))
        return index_dir


def _default_etld1(url: str) -> str | None:
    try:
        return split_url(url).etld1
    except Exception:
        return None
