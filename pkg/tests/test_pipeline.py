import hashlib
from datetime import date
from pathlib import Path

import pytest

from baitwatch.config import PipelineConfig, load_config
from baitwatch.errors import ConfigError, StageFailure
from baitwatch.pipeline import PipelineEnv, PipelineLock, ingest, run_day
from baitwatch.store import EventStore

from fakes import ScriptedTransport
from pdfbuild import build_pdf

DAY = date(2022, 6, 22)


def make_config(tmp_path, **overrides) -> PipelineConfig:
    cfg = PipelineConfig(**overrides)
    return cfg.resolve(tmp_path)


def passing_pdf(tmp_path, name, urls=None):
    urls = urls or [f"http://h{i}.example/files/doc{i}.pdf" for i in range(8)]
    data, _ = build_pdf([[(u, "annot") for u in urls]])
    path = tmp_path / name
    path.write_bytes(data)
    return path, urls


class TestConfig:
    def test_defaults_match_pipeline_constants(self):
        cfg = PipelineConfig()
        assert cfg.seo_min_links == 5
        assert cfg.seo_min_mean == 1.0
        assert cfg.fqdn_threshold == 100
        assert cfg.pdf_volume_threshold == 5000
        assert cfg.cluster_eps0 == 0.25
        assert cfg.cluster_eps_step == 0.01
        assert cfg.triplet_margin == 0.2
        assert cfg.offline_days == 3
        assert cfg.resample_n == 20
        assert cfg.path_group_sample == 10
        assert cfg.per_host_rps == 1.0
        assert cfg.vt_daily_quota == 4000
        assert cfg.prune_window_days == 14
        assert cfg.capture_wait_seconds == 15

    def test_key_value_file(self, tmp_path):
        cfg_file = tmp_path / "pipeline.conf"
        cfg_file.write_text("# comment\noffline_days=5\nvantages=primary,vpn-1\n")
        cfg = load_config(cfg_file, env={})
        assert cfg.offline_days == 5
        assert cfg.vantages == ("primary", "vpn-1")

    def test_env_override_wins(self, tmp_path):
        cfg_file = tmp_path / "pipeline.conf"
        cfg_file.write_text("offline_days=5\n")
        cfg = load_config(cfg_file, env={"PCF_OFFLINE_DAYS": "7"})
        assert cfg.offline_days == 7

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "pipeline.conf"
        cfg_file.write_text("mystery_knob=1\n")
        with pytest.raises(ConfigError):
            load_config(cfg_file, env={})

    def test_nonpositive_threshold_rejected(self, tmp_path):
        cfg_file = tmp_path / "pipeline.conf"
        cfg_file.write_text("offline_days=0\n")
        with pytest.raises(ConfigError):
            load_config(cfg_file, env={})

    def test_user_agent_carries_contact_and_optout(self):
        ua = PipelineConfig().user_agent()
        assert "contact:" in ua and "opt-out" in ua


class TestIngest:
    def test_passing_pdf_fans_out(self, tmp_path):
        config = make_config(tmp_path)
        store = EventStore(config.store_dir)
        path, urls = passing_pdf(tmp_path, "a.pdf")
        summary = ingest(store, [path], DAY, config)
        assert summary["passed"] == 1
        assert summary["registered_urls"] == 8
        assert set(store.registered_urls()) == set(urls)

    def test_failing_seo_pdf_audited_not_registered(self, tmp_path):
        config = make_config(tmp_path)
        store = EventStore(config.store_dir)
        data, _ = build_pdf([[("http://only.example/one.pdf", "annot")]])
        path = tmp_path / "weak.pdf"
        path.write_bytes(data)
        summary = ingest(store, [path], DAY, config)
        assert summary["passed"] == 0
        assert store.registered_urls() == {}
        audits = list(store.iter_records("seo_audit"))
        assert len(audits) == 1
        entry = store.dataset_entries()[0]
        assert entry.seo_verdict is False

    def test_duplicate_sha_single_entry(self, tmp_path):
        config = make_config(tmp_path)
        store = EventStore(config.store_dir)
        path, _ = passing_pdf(tmp_path, "a.pdf")
        ingest(store, [path], DAY, config)
        summary = ingest(store, [path], DAY, config)
        assert summary["duplicates"] == 0  # same day: same entry returned
        assert len(store.dataset_entries()) == 1

    def test_parse_errors_collected_not_fatal(self, tmp_path):
        config = make_config(tmp_path)
        store = EventStore(config.store_dir)
        bad = tmp_path / "broken.pdf"
        bad.write_bytes(b"not a pdf")
        good, _ = passing_pdf(tmp_path, "good.pdf")
        summary = ingest(store, [bad, good], DAY, config)
        assert summary["passed"] == 1
        assert len(summary["errors"]) == 1


def store_fingerprint(store_dir) -> dict:
    """Byte-level digest of every derived/index file plus the event logs."""
    out = {}
    for path in sorted(Path(store_dir).rglob("*")):
        if path.is_file() and path.name != ".lock":
            out[str(path.relative_to(store_dir))] = hashlib.sha256(
                path.read_bytes()).hexdigest()
    return out


class TestRunDay:
    def test_empty_store_all_stages_ok(self, tmp_path):
        config = make_config(tmp_path)
        results = run_day(config, DAY)
        assert [r.status for r in results] == ["ok"] * 5

    def test_full_day_and_idempotent_rerun(self, tmp_path):
        config = make_config(tmp_path)
        pdf_path, urls = passing_pdf(tmp_path, "seed.pdf")
        transport = ScriptedTransport()
        for url in urls:
            transport.script_online(url)
        env = PipelineEnv(transport=transport, ingest_paths=[pdf_path])
        first = run_day(config, DAY, env=env)
        assert [r.status for r in first] == ["ok"] * 5
        snapshot = store_fingerprint(config.store_dir)
        second = run_day(config, DAY, env=env)
        assert [r.status for r in second] == ["ok"] * 5
        assert store_fingerprint(config.store_dir) == snapshot

    def test_probe_failure_skips_ioc_but_netmeta_runs(self, tmp_path):
        config = make_config(tmp_path)
        pdf_path, urls = passing_pdf(tmp_path, "seed.pdf")

        class ExplodingTransport:
            def head(self, url, vantage):
                raise RuntimeError("transport wiring broken")

            def get(self, url, vantage):
                raise RuntimeError("transport wiring broken")

        env = PipelineEnv(transport=ExplodingTransport(), ingest_paths=[pdf_path])
        results = {r.name: r for r in run_day(config, DAY, env=env)}
        assert results["probe"].status == "failed"
        assert results["ioc"].status == "skipped"
        assert results["netmeta"].status == "ok"
        assert results["hosting"].status == "ok"

    def test_lock_prevents_concurrent_runs(self, tmp_path):
        config = make_config(tmp_path)
        Path(config.store_dir).mkdir(parents=True, exist_ok=True)
        with PipelineLock(config.store_dir):
            with pytest.raises(StageFailure):
                run_day(config, DAY)
        # lock released: run proceeds
        assert [r.status for r in run_day(config, DAY)] == ["ok"] * 5

    def test_ioc_stage_records_path_indicators(self, tmp_path):
        config = make_config(tmp_path)
        url = "http://vuln.example/ckfinder/userfiles/x.pdf"
        pdf_path, _ = passing_pdf(
            tmp_path, "seed.pdf",
            urls=[url] + [f"http://p{i}.example/d/f{i}.pdf" for i in range(7)])
        transport = ScriptedTransport()  # probes fail -> unknown days; fine
        env = PipelineEnv(transport=transport, ingest_paths=[pdf_path])
        results = {r.name: r for r in run_day(config, DAY, env=env)}
        assert results["ioc"].status == "ok"
        store = EventStore(config.store_dir)
        hits = list(store.iter_records("ioc"))
        assert any(rec["indicator"] == "CK-family" and rec["url"] == url
                   for rec in hits)


class TestVantageParsing:
    def test_names_and_proxies(self):
        cfg = PipelineConfig(vantages=("primary", "vpn-1=socks5://10.0.0.2:1080"))
        assert cfg.vantage_names() == ["primary", "vpn-1"]
        assert cfg.vantage_proxies() == {"vpn-1": "socks5://10.0.0.2:1080"}

    def test_renewed_url_via_ingest(self, tmp_path):
        from baitwatch.store import ProbeEvent
        config = make_config(tmp_path)
        store = EventStore(config.store_dir)
        url = "http://back.example/files/a.pdf"
        urls = [url] + [f"http://h{i}.example/files/f{i}.pdf" for i in range(7)]
        path, _ = passing_pdf(tmp_path, "first.pdf", urls=urls)
        ingest(store, [path], DAY, config)
        from datetime import timedelta
        for n in range(3):
            store.append_probe(ProbeEvent(url, DAY + timedelta(days=n),
                                          "offline", "primary", "status 404"))
        # same backlink arrives in a later document: monitoring restarts
        path2, _ = passing_pdf(tmp_path, "second.pdf", urls=urls)
        summary = ingest(store, [path2], DAY + timedelta(days=10), config)
        assert summary["renewed_urls"] == 1
        renewals = list(store.iter_records("renewals"))
        assert renewals[0]["url"] == url
