from dyadic_hilbert.harness import LEVELS, SUITES, format_report, run_selfcheck


def test_every_criterion_has_a_suite():
    crits = {c for _, c, _, _ in SUITES if c}
    assert crits == set(range(1, 14))


def test_levels_share_keys():
    assert set(LEVELS["fast"]) == set(LEVELS["full"])
    assert all(key in LEVELS["fast"] for _, _, key, _ in SUITES)


def test_report_reproducible():
    a = format_report(run_selfcheck("fast", 11, only={1, 5}), "fast", 11)
    b = format_report(run_selfcheck("fast", 11, only={1, 5}), "fast", 11)
    assert a == b and "FAIL" not in a


def test_crash_counts_as_failure(monkeypatch):
    import dyadic_hilbert.harness as h

    def broken(seed, count):
        raise RuntimeError("boom")

    monkeypatch.setattr(h, "SUITES", (("x.broken", 0, "coeff", broken),))
    (r,) = h.run_selfcheck("fast", 1)
    assert not r.passed and "boom" in r.detail
