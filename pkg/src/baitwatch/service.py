"""HTTP service wrapping the pipeline; the CLI talks to these endpoints.

One service instance owns one store directory (single writer); every
pipeline surface is exposed as an endpoint with typed request/response
models. Heavy externals (probe transport, resolvers, scanners) come from
the PipelineEnv wired in at app construction.
"""

from __future__ import annotations

import json
from datetime import date
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import clustering
from .config import PipelineConfig, load_config
from .errors import BaitwatchError, InsufficientHistory
from .hosting import candidates_by_fqdn, candidates_by_volume, load_provider_table
from .ioc import (
    acl_probe,
    load_location_catalog,
    match_path_indicators,
    plan_version_scan,
)
from .netmeta import enrich
from .netmeta.urlsplit import split_url
from .notify import (
    remediation_analysis,
    render_report,
    schedule_rounds,
    select_contact,
    split_groups,
    write_outbox,
)
from .pipeline import PipelineEnv, domain_counts, ingest, run_day
from .probe import uptime_report
from .store import EventStore


# --- request/response models ---

class HealthResponse(BaseModel):
    status: str = "ok"
    store_dir: str


class IngestRequest(BaseModel):
    pdf_paths: list[str]
    day: date
    source: str = "seed"


class IngestResponse(BaseModel):
    documents: int
    passed: int
    registered_urls: int
    renewed_urls: int
    duplicates: int
    errors: list[str] = Field(default_factory=list)


class RunDayRequest(BaseModel):
    day: date


class StageResultModel(BaseModel):
    name: str
    status: str
    detail: str = ""


class RunDayResponse(BaseModel):
    day: date
    stages: list[StageResultModel]
    failed: bool


class ProbeRunRequest(BaseModel):
    day: date


class ProbeRunResponse(BaseModel):
    counts: dict[str, int]


class ProbeReportResponse(BaseModel):
    uptime_by_hosting_type: dict[str, dict[str, float]]
    extended_lifetime_by_etld1: dict[str, int]


class EnrichRequest(BaseModel):
    urls: list[str]
    day: date | None = None


class HostRecordModel(BaseModel):
    fqdn: str
    etld1: str
    ip: str | None = None
    asn: int | None = None
    as_name: str | None = None
    whois_contacts: list[str] = Field(default_factory=list)


class EnrichResponse(BaseModel):
    records: list[HostRecordModel]
    skipped: list[str] = Field(default_factory=list)


class HostingClassifyResponse(BaseModel):
    assignments: dict[str, str]
    candidates: list[str]


class HostingReportResponse(BaseModel):
    by: str
    counts: dict[str, int]
    candidates: list[str]
    threshold: int


class IocScanRequest(BaseModel):
    plan_only: bool = True


class ScanTargetModel(BaseModel):
    fqdn: str
    path_group: str
    component: str
    location: str
    probe_url: str


class IocScanResponse(BaseModel):
    targets: list[ScanTargetModel]
    path_groups: int


class IocAclRequest(BaseModel):
    buckets: list[str]


class AclReportModel(BaseModel):
    bucket: str
    exists: bool
    readable_acl: bool
    grants: list[str]
    object_listing: int | None = None


class IocAclResponse(BaseModel):
    reports: list[AclReportModel]


class ClusterRunRequest(BaseModel):
    embeddings: str
    anchors: str


class ClusterRunResponse(BaseModel):
    points: int
    clusters: int
    noise: int
    new_clusters: int
    refined_clusters: int
    assignments_file: str


class NotifyPlanRequest(BaseModel):
    day: date
    seed: int | None = None


class NotifyPlanResponse(BaseModel):
    contacts: int
    treatment_fqdns: int
    control_fqdns: int
    synthetic_contacts: int
    live_pdfs: int


class NotifyRenderResponse(BaseModel):
    rendered: int
    outbox_dir: str
    send_dates: list[date]


class NotifyAnalyzeRequest(BaseModel):
    deadline: date


class GroupStatsModel(BaseModel):
    pdfs_total: int
    pdfs_offline_by_deadline: int
    rate: float


class NotifyAnalyzeResponse(BaseModel):
    per_group: dict[str, GroupStatsModel]
    coefficient: float
    p_value: float
    taxonomy: dict[str, str | None] = Field(default_factory=dict)


class AsTablesResponse(BaseModel):
    by_fqdn: list[tuple[str, int]]
    by_pdf: list[tuple[str, int]]


class StatsResponse(BaseModel):
    registered_urls: int
    dataset_entries: int
    dataset_passing: int
    etld1s: int
    path_indicator_hits: int


def _hosting_map(store) -> dict:
    path = Path(store.root) / "index" / "hosting.tsv"
    mapping = {}
    if path.exists():
        for line in path.read_text().splitlines():
            fields = line.split("\t")
            if len(fields) >= 2:
                mapping[fields[0]] = fields[1]
    return mapping


def create_app(config: PipelineConfig | None = None,
               env: PipelineEnv | None = None) -> FastAPI:
    config = config or load_config()
    env = env or PipelineEnv()
    store = EventStore(config.store_dir)
    app = FastAPI(title="baitwatch", version="0.1.0")
    app.state.config = config
    app.state.env = env
    app.state.store = store

    @app.exception_handler(BaitwatchError)
    async def _domain_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422,
                            content={"error": type(exc).__name__,
                                     "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(store_dir=str(store.root))

    @app.post("/ingest", response_model=IngestResponse)
    def ingest_documents(request: IngestRequest):
        summary = ingest(store, request.pdf_paths, request.day, config,
                         source=request.source)
        return IngestResponse(**summary)

    @app.post("/run-day", response_model=RunDayResponse)
    def run_one_day(request: RunDayRequest):
        results = run_day(config, request.day, env=env, store=store)
        stages = [StageResultModel(name=r.name, status=r.status, detail=r.detail)
                  for r in results]
        return RunDayResponse(day=request.day, stages=stages,
                              failed=any(r.status == "failed" for r in results))

    @app.post("/probe/run", response_model=ProbeRunResponse)
    def probe_run(request: ProbeRunRequest):
        from .probe import BodyStore, run_probe_day

        counts = run_probe_day(
            store, request.day, env.transport, config.vantage_names(),
            BodyStore(config.pdf_dir), offline_days=config.offline_days,
            per_host_rps=config.per_host_rps,
        )
        return ProbeRunResponse(counts=counts)

    @app.get("/probe/report", response_model=ProbeReportResponse)
    def probe_report():
        report = uptime_report(store, _hosting_map(store))
        return ProbeReportResponse(**report)

    @app.post("/netmeta/enrich", response_model=EnrichResponse)
    def netmeta_enrich(request: EnrichRequest):
        records, skipped = [], []
        seen = set()
        for url in request.urls:
            try:
                fqdn = split_url(url).fqdn
            except BaitwatchError as exc:
                skipped.append(f"{url}: {exc}")
                continue
            if fqdn in seen:
                continue
            seen.add(fqdn)
            record = enrich(fqdn, env.resolver, env.whois, on_day=request.day)
            store.append_record("hosts", {
                "fqdn": record.fqdn, "etld1": record.etld1, "ip": record.ip,
                "asn": record.asn, "as_name": record.as_name,
                "whois_contacts": record.whois_contacts,
            })
            records.append(HostRecordModel(
                fqdn=record.fqdn, etld1=record.etld1, ip=record.ip,
                asn=record.asn, as_name=record.as_name,
                whois_contacts=list(record.whois_contacts),
            ))
        return EnrichResponse(records=records, skipped=skipped)

    @app.get("/netmeta/as-tables", response_model=AsTablesResponse)
    def netmeta_as_tables():
        from importlib import resources

        from .netmeta import HostRecord, as_tables, load_alias_map

        if config.as_alias_file:
            alias_map = load_alias_map(config.as_alias_file)
        else:
            alias_map = load_alias_map(
                resources.files("baitwatch.data").joinpath("as-aliases.tsv"))
        records = [
            HostRecord(fqdn=rec["fqdn"], etld1=rec["etld1"], ip=rec.get("ip"),
                       asn=rec.get("asn"), as_name=rec.get("as_name"))
            for rec in store.iter_records("hosts")
        ]
        pdf_counts: dict = {}
        for url in store.registered_urls():
            try:
                fqdn = split_url(url).fqdn
            except BaitwatchError:
                continue
            pdf_counts[fqdn] = pdf_counts.get(fqdn, 0) + 1
        by_fqdn, by_pdf = as_tables(records, pdf_counts, alias_map)
        return AsTablesResponse(by_fqdn=by_fqdn, by_pdf=by_pdf)

    @app.post("/hosting/classify", response_model=HostingClassifyResponse)
    def hosting_classify():
        from .hosting import classify_full

        curated = load_provider_table(config.providers_file or None)
        fqdn_counts, url_counts = domain_counts(store)
        flagged = set(candidates_by_fqdn(fqdn_counts, config.fqdn_threshold)) | \
            set(candidates_by_volume(url_counts, config.pdf_volume_threshold))
        assignments = {}
        for etld1 in sorted(set(fqdn_counts) | set(curated)):
            assignments[etld1] = classify_full(etld1, curated, set()).hosting_type
        return HostingClassifyResponse(assignments=assignments,
                                       candidates=sorted(flagged))

    @app.get("/hosting/report", response_model=HostingReportResponse)
    def hosting_report(by: str = "fqdn"):
        if by not in ("fqdn", "pdf"):
            raise HTTPException(status_code=422, detail="by must be fqdn or pdf")
        fqdn_counts, url_counts = domain_counts(store)
        if by == "fqdn":
            counts, threshold = fqdn_counts, config.fqdn_threshold
            candidates = candidates_by_fqdn(counts, threshold)
        else:
            counts, threshold = url_counts, config.pdf_volume_threshold
            candidates = candidates_by_volume(counts, threshold)
        return HostingReportResponse(by=by, counts=counts,
                                     candidates=candidates, threshold=threshold)

    @app.post("/ioc/scan", response_model=IocScanResponse)
    def ioc_scan(request: IocScanRequest):
        catalog = load_location_catalog()
        urls = [u for u in store.registered_urls() if match_path_indicators(u)]
        targets = plan_version_scan(urls, catalog, seed=config.seed,
                                    sample_size=config.path_group_sample)
        return IocScanResponse(
            targets=[ScanTargetModel(**vars(t)) for t in targets],
            path_groups=len({t.path_group for t in targets}),
        )

    @app.post("/ioc/acl", response_model=IocAclResponse)
    def ioc_acl(request: IocAclRequest):
        if env.storage_client is None:
            raise HTTPException(status_code=503,
                                detail="no object-storage client configured")
        reports = []
        for bucket in request.buckets:
            report = acl_probe(bucket, env.storage_client)
            store.append_record("acl", {
                "bucket": report.bucket, "exists": report.exists,
                "readable_acl": report.readable_acl,
                "grants": sorted(report.grants),
                "object_listing": report.object_listing,
            })
            reports.append(AclReportModel(
                bucket=report.bucket, exists=report.exists,
                readable_acl=report.readable_acl, grants=sorted(report.grants),
                object_listing=report.object_listing,
            ))
        return IocAclResponse(reports=reports)

    @app.post("/cluster/run", response_model=ClusterRunResponse)
    def cluster_run(request: ClusterRunRequest):
        points = clustering.load_embeddings(request.embeddings)
        anchors = clustering.load_anchors(request.anchors)
        try:
            assignments, stats = clustering.cluster_pipeline(
                points, anchors, eps0=config.cluster_eps0,
                step=config.cluster_eps_step, min_pts=config.cluster_min_pts,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        out = Path(store.root) / "index" / "cluster-assignments.tsv"
        out.parent.mkdir(exist_ok=True)
        lines = [f"{a.sha256}\t{a.cluster_id}\t{a.label}" for a in assignments]
        out.write_text("\n".join(lines) + ("\n" if lines else ""))
        labels = {a.label for a in assignments}
        return ClusterRunResponse(
            points=len(points),
            clusters=len({a.cluster_id for a in assignments
                          if a.cluster_id != clustering.NOISE}),
            noise=sum(1 for a in assignments
                      if a.cluster_id == clustering.NOISE),
            new_clusters=sum(1 for lbl in labels
                             if lbl == clustering.NEW_CLUSTER),
            refined_clusters=stats["refined_clusters"],
            assignments_file=str(out),
        )

    @app.post("/notify/plan", response_model=NotifyPlanResponse)
    def notify_plan(request: NotifyPlanRequest):
        seed = request.seed if request.seed is not None else config.seed
        live: dict = {}
        for url in store.registered_urls():
            if store.day_status(url, request.day) != "online":
                continue
            try:
                parts = split_url(url)
            except BaitwatchError:
                continue
            live.setdefault(parts.fqdn, []).append(parts.path)
        if not live:
            raise HTTPException(status_code=422,
                                detail=f"no live PDFs observed on {request.day}")
        whois_contacts = {rec["fqdn"]: rec.get("whois_contacts") or []
                          for rec in store.iter_records("hosts")}
        contacts_by_fqdn = {}
        synthetic = 0
        for fqdn in sorted(live):
            choice = select_contact(whois_contacts.get(fqdn), fqdn, seed=seed)
            if choice.source == "synthetic":
                synthetic += 1
            contacts_by_fqdn[fqdn] = choice.emails[0]
        assignment = split_groups(sorted(live), seed=seed,
                                  contacts_by_fqdn=contacts_by_fqdn)
        plan = {
            "day": request.day.isoformat(),
            "seed": seed,
            "fqdn_group": assignment.fqdn_group,
            "contact_group": assignment.contact_group,
            "contacts_by_fqdn": contacts_by_fqdn,
            "live": live,
        }
        (Path(store.root) / "notify-plan.json").write_text(
            json.dumps(plan, indent=2, sort_keys=True))
        groups = assignment.fqdn_group.values()
        return NotifyPlanResponse(
            contacts=len(assignment.contact_group),
            treatment_fqdns=sum(1 for g in groups if g == "Treatment"),
            control_fqdns=sum(1 for g in groups if g == "Control"),
            synthetic_contacts=synthetic,
            live_pdfs=sum(len(v) for v in live.values()),
        )

    def _load_plan() -> dict:
        path = Path(store.root) / "notify-plan.json"
        if not path.exists():
            raise HTTPException(status_code=409,
                                detail="run /notify/plan first")
        return json.loads(path.read_text())

    @app.post("/notify/render", response_model=NotifyRenderResponse)
    def notify_render():
        plan = _load_plan()
        start = date.fromisoformat(plan["day"])
        events = schedule_rounds(start, plan["contact_group"])
        domains_per_contact: dict = {}
        for fqdn, contact in plan["contacts_by_fqdn"].items():
            domains_per_contact.setdefault(contact, []).append(fqdn)
        rendered = 0
        first_round = [e for e in events if e.round_no in (1, 4)]
        for event in first_round:
            live = {fqdn: plan["live"][fqdn]
                    for fqdn in domains_per_contact.get(event.contact, [])
                    if plan["live"].get(fqdn)}
            if not live:
                continue
            report = render_report(event.contact, live,
                                   config.notify_institution,
                                   config.notify_country, config.notify_sender)
            write_outbox(report, config.outbox_dir, config.notify_sender,
                         round_no=event.round_no)
            rendered += 1
        return NotifyRenderResponse(
            rendered=rendered, outbox_dir=str(config.outbox_dir),
            send_dates=sorted({e.send_date for e in events}),
        )

    @app.post("/notify/analyze", response_model=NotifyAnalyzeResponse)
    def notify_analyze(request: NotifyAnalyzeRequest):
        plan = _load_plan()
        notified = []
        for fqdn, paths in plan["live"].items():
            group = plan["fqdn_group"][fqdn]
            for url in store.registered_urls():
                try:
                    parts = split_url(url)
                except BaitwatchError:
                    continue
                if parts.fqdn == fqdn and parts.path in paths:
                    notified.append((url, group))
        try:
            result = remediation_analysis(store, notified, request.deadline)
        except InsufficientHistory as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return NotifyAnalyzeResponse(
            per_group={g: GroupStatsModel(
                pdfs_total=s.pdfs_total,
                pdfs_offline_by_deadline=s.pdfs_offline_by_deadline,
                rate=s.rate) for g, s in result.per_group.items()},
            coefficient=result.coefficient,
            p_value=result.p_value,
            taxonomy=result.taxonomy,
        )

    @app.get("/stats", response_model=StatsResponse)
    def stats():
        entries = store.dataset_entries()
        return StatsResponse(
            registered_urls=len(store.registered_urls()),
            dataset_entries=len(entries),
            dataset_passing=sum(1 for e in entries if e.seo_verdict),
            etld1s=len(store.etld1s()),
            path_indicator_hits=sum(1 for _ in store.iter_records("ioc")),
        )

    return app
