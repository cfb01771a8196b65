import random
from datetime import date, timedelta

import pytest
from scipy.stats import fisher_exact

from baitwatch.errors import InsufficientHistory, NoLivePdfs
from baitwatch.notify import (
    classify_cleanup,
    fit_logistic_glm,
    parse_report_csv,
    remediation_analysis,
    render_report,
    schedule_rounds,
    select_contact,
    split_groups,
    wald_p_value,
    write_outbox,
)
from baitwatch.store import EventStore, ProbeEvent

NOTIFY_START = date(2022, 12, 1)


class TestSelectContact:
    def test_abuse_preferred(self):
        whois = "tech: noc@x.example\nabuse-mailbox: abuse@x.example\n"
        choice = select_contact(whois, "x.example")
        assert choice.emails == ("abuse@x.example",)
        assert choice.source == "whois"

    def test_hostmaster_second(self):
        choice = select_contact(["hostmaster@x.example", "sales@x.example"],
                                "x.example")
        assert choice.emails == ("hostmaster@x.example",)

    def test_random_fallback_is_seeded(self):
        emails = ["noc@x.example", "it@x.example", "webmaster@x.example"]
        first = select_contact(emails, "x.example", seed=3)
        second = select_contact(emails, "x.example", seed=3)
        assert first == second
        assert first.emails[0] in emails

    def test_synthetic_aliases(self):
        choice = select_contact("", "example.org")
        assert choice.source == "synthetic"
        assert choice.emails == ("abuse@example.org", "info@example.org",
                                 "security@example.org", "hostmaster@example.org")


class TestSplitGroups:
    def test_even_split(self):
        fqdns = [f"h{i}.example" for i in range(10)]
        assignment = split_groups(fqdns, seed=1)
        assert assignment.pre_lift_sizes == (5, 5)

    def test_odd_split(self):
        fqdns = [f"h{i}.example" for i in range(11)]
        assignment = split_groups(fqdns, seed=1)
        assert assignment.pre_lift_sizes == (6, 5)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            split_groups(["a.example", "a.example"], seed=1)

    def test_majority_lift(self):
        fqdns = [f"h{i}.example" for i in range(20)]
        contacts = {f: "ops@big.example" for f in fqdns[:3]}
        for seed in range(10):
            assignment = split_groups(fqdns, seed=seed, contacts_by_fqdn=contacts)
            groups = {assignment.fqdn_group[f] for f in fqdns[:3]}
            assert len(groups) == 1  # whole contact in one group
            assert assignment.contact_group["ops@big.example"] in groups

    def test_lift_majority_matches_recount_oracle(self):
        fqdns = [f"h{i}.example" for i in range(9)]
        contacts = {f: "ops@big.example" for f in fqdns[:3]}
        for seed in range(25):
            raw = split_groups(fqdns, seed=seed)  # pure per-domain split
            treat = sum(1 for f in fqdns[:3]
                        if raw.fqdn_group[f] == "Treatment")
            expected = "Treatment" if treat >= 2 else "Control"
            lifted = split_groups(fqdns, seed=seed, contacts_by_fqdn=contacts)
            assert lifted.contact_group["ops@big.example"] == expected

    def test_pure_split_available_behind_flag(self):
        fqdns = [f"h{i}.example" for i in range(8)]
        contacts = {f: "ops@big.example" for f in fqdns}
        assignment = split_groups(fqdns, seed=2, contacts_by_fqdn=contacts,
                                  lift=False)
        assert set(assignment.fqdn_group.values()) == {"Treatment", "Control"}


class TestRenderReport:
    INSTITUTION = ("Example Institute", "Example Country", "research@example.org")

    def test_small_report_lists_everything(self):
        report = render_report(
            "abuse@host.example",
            {"host.example": ["/a/1.pdf", "/a/2.pdf"]},
            *self.INSTITUTION,
        )
        assert "/a/1.pdf" in report.body and "/a/2.pdf" in report.body
        parsed = parse_report_csv(report.csv_text)
        assert parsed == {"host.example": ["/a/1.pdf", "/a/2.pdf"]}

    def test_caps_three_domains_three_links(self):
        live = {f"d{i}.example": [f"/p/{j}.pdf" for j in range(10)]
                for i in range(5)}
        report = render_report("abuse@big.example", live, *self.INSTITUTION)
        shown_domains = [d for d in live if f"{d}:" in report.body]
        assert len(shown_domains) == 3
        assert report.body.count(".pdf") == 9
        assert len(parse_report_csv(report.csv_text)["d0.example"]) == 10
        total_rows = sum(len(v) for v in parse_report_csv(report.csv_text).values())
        assert total_rows == 50

    def test_csv_round_trip(self):
        rng = random.Random(13)
        live = {}
        for i in range(8):
            live[f"d{i}.example"] = sorted(
                f"/dir{rng.randint(0, 9)}/f{j}.pdf" for j in range(rng.randint(1, 6)))
        from baitwatch.notify.render import render_csv
        assert parse_report_csv(render_csv(live)) == live

    def test_no_live_pdfs(self):
        with pytest.raises(NoLivePdfs):
            render_report("abuse@x.example", {"x.example": []}, *self.INSTITUTION)

    def test_urls_reduced_to_relative_paths(self):
        report = render_report(
            "abuse@host.example",
            {"host.example": ["http://host.example/files/doc.pdf"]},
            *self.INSTITUTION,
        )
        assert parse_report_csv(report.csv_text) == \
            {"host.example": ["/files/doc.pdf"]}

    def test_deterministic(self):
        live = {"b.example": ["/2.pdf", "/1.pdf"], "a.example": ["/x.pdf"]}
        one = render_report("c@e.example", dict(live), *self.INSTITUTION)
        two = render_report("c@e.example", dict(reversed(live.items())),
                            *self.INSTITUTION)
        assert one == two

    def test_outbox_eml(self, tmp_path):
        report = render_report("abuse@host.example",
                               {"host.example": ["/a.pdf"]}, *self.INSTITUTION)
        path = write_outbox(report, tmp_path / "outbox", "research@example.org",
                            round_no=1)
        raw = open(path, "rb").read()
        assert b"To: abuse@host.example" in raw
        assert b"affected-files.csv" in raw


class TestScheduleRounds:
    GROUPS = {"t1@example.org": "Treatment", "t2@example.org": "Treatment",
              "c1@example.org": "Control"}

    def test_timeline(self):
        events = schedule_rounds(date(2022, 12, 1), self.GROUPS)
        t1_dates = [e.send_date for e in events if e.contact == "t1@example.org"]
        assert t1_dates == [date(2022, 12, 1), date(2022, 12, 11),
                            date(2022, 12, 21)]
        control = [e for e in events if e.group == "Control"]
        assert [e.send_date for e in control] == [date(2022, 12, 31)]

    def test_bounced_removed_from_later_rounds_and_control(self):
        events = schedule_rounds(date(2022, 12, 1), self.GROUPS,
                                 bounced_round1={"t1@example.org",
                                                 "c1@example.org"})
        t1 = [e.round_no for e in events if e.contact == "t1@example.org"]
        assert t1 == [1]
        assert not any(e.contact == "c1@example.org" for e in events)

    def test_opted_out_absent_from_subsequent_sends(self):
        events = schedule_rounds(date(2022, 12, 1), self.GROUPS,
                                 opted_out={"t2@example.org"})
        t2 = [e.round_no for e in events if e.contact == "t2@example.org"]
        assert t2 == [1]


def build_history(tmp_path, cleaned_treat, total_treat, cleaned_ctrl, total_ctrl):
    """Store where cleaned PDFs go offline before the deadline."""
    store = EventStore(tmp_path / "store")
    pdfs = []
    for group, cleaned, total in (("Treatment", cleaned_treat, total_treat),
                                  ("Control", cleaned_ctrl, total_ctrl)):
        for i in range(total):
            url = f"http://{group.lower()}{i}.example/f.pdf"
            pdfs.append((url, group))
            store.append_probe(ProbeEvent(url, NOTIFY_START, "online", "primary"))
            final = "offline" if i < cleaned else "online"
            store.append_probe(ProbeEvent(url, NOTIFY_START + timedelta(days=20),
                                          final, "primary",
                                          "status 404" if final == "offline" else ""))
    return store, pdfs


class TestRemediationAnalysis:
    def test_30_vs_6_significant_and_agrees_with_fisher(self, tmp_path):
        store, pdfs = build_history(tmp_path, 30, 100, 6, 100)
        deadline = NOTIFY_START + timedelta(days=30)
        result = remediation_analysis(store, pdfs, deadline)
        treat = result.per_group["Treatment"]
        ctrl = result.per_group["Control"]
        assert treat.rate == pytest.approx(0.30)
        assert ctrl.rate == pytest.approx(0.06)
        assert result.p_value < 0.01
        assert result.coefficient > 0  # treatment cleans more
        # independent oracle: Fisher exact on the 2x2 table
        _, fisher_p = fisher_exact([[30, 70], [6, 94]])
        assert fisher_p < 0.01

    def test_equal_rates_not_significant(self, tmp_path):
        store, pdfs = build_history(tmp_path, 10, 100, 10, 100)
        result = remediation_analysis(store, pdfs,
                                      NOTIFY_START + timedelta(days=30))
        assert result.p_value > 0.05

    def test_sign_matches_rate_difference(self, tmp_path):
        rng = random.Random(17)
        for trial in range(5):
            a, b = rng.randint(5, 45), rng.randint(5, 45)
            if a == b:
                continue
            store, pdfs = build_history(tmp_path / str(trial), a, 60, b, 60)
            result = remediation_analysis(store, pdfs,
                                          NOTIFY_START + timedelta(days=30))
            assert (result.coefficient > 0) == (a > b)

    def test_missing_history_raises(self, tmp_path):
        store = EventStore(tmp_path / "store")
        with pytest.raises(InsufficientHistory):
            remediation_analysis(store, [("http://ghost.example/f.pdf", "Treatment")],
                                 NOTIFY_START)

    def test_rates_in_unit_interval(self, tmp_path):
        store, pdfs = build_history(tmp_path, 0, 40, 40, 40)
        result = remediation_analysis(store, pdfs,
                                      NOTIFY_START + timedelta(days=30))
        for stats in result.per_group.values():
            assert 0.0 <= stats.rate <= 1.0


class TestCleanupTaxonomy:
    def test_email_body_only(self):
        reported = {f"u{i}": i < 9 for i in range(40)}  # only the 9 body urls gone
        body = [f"u{i}" for i in range(9)]
        assert classify_cleanup(reported, body, {}) == "EmailBodyOnly"

    def test_partial(self):
        reported = {f"u{i}": True for i in range(10)}
        post = {"new1": False}
        assert classify_cleanup(reported, ["u0"], post) == "Partial"

    def test_deep(self):
        reported = {f"u{i}": True for i in range(10)}
        post = {"new1": True}
        assert classify_cleanup(reported, ["u0"], post) == "Deep"

    def test_no_cleanup(self):
        reported = {f"u{i}": False for i in range(10)}
        assert classify_cleanup(reported, ["u0"], {}) is None


class TestGlmInternals:
    def test_coefficients_recover_logit_difference(self):
        import math
        X = [[1.0, 1.0]] * 100 + [[1.0, 0.0]] * 100
        y = [1.0] * 30 + [0.0] * 70 + [1.0] * 6 + [0.0] * 94
        beta, cov = fit_logistic_glm(X, y)
        logit = lambda p: math.log(p / (1 - p))
        assert beta[0] == pytest.approx(logit(0.06), abs=1e-6)
        assert beta[1] == pytest.approx(logit(0.30) - logit(0.06), abs=1e-6)
        assert wald_p_value(beta, cov) < 0.001

    def test_wald_null(self):
        X = [[1.0, 1.0]] * 50 + [[1.0, 0.0]] * 50
        y = [1.0] * 10 + [0.0] * 40 + [1.0] * 10 + [0.0] * 40
        beta, cov = fit_logistic_glm(X, y)
        assert abs(beta[1]) < 1e-8
        assert wald_p_value(beta, cov) > 0.9
