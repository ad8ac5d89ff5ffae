"""Suite reports: aggregation, digests, deterministic rendering.

Exit-code contract: 0 all verified/vacuous, 1 inconclusive present,
2 critical finding (in-hypothesis refutation or replay mismatch).
"""

import hashlib
import io
import json
import time

import wittlab


def _canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class SuiteReport:
    def __init__(self, suite, seed=0, config=None):
        self.suite = suite
        self.seed = seed
        self.config = config or {}
        self.cases = []
        self.started = time.time()
        self.wallclock = None

    def add(self, name, status, detail=None, critical=False,
            inconclusive=False):
        self.cases.append({
            "case": name,
            "status": status,
            "critical": bool(critical),
            "inconclusive": bool(inconclusive),
            "detail": detail if detail is not None else {},
        })

    def finish(self):
        self.wallclock = time.time() - self.started
        return self

    @property
    def aggregate(self):
        if any(c["critical"] for c in self.cases):
            return "critical"
        if any(c["inconclusive"] for c in self.cases):
            return "inconclusive"
        return "ok"

    @property
    def exit_code(self):
        return {"ok": 0, "inconclusive": 1, "critical": 2}[self.aggregate]

    def digest(self):
        """Digest of the deterministic content (timing excluded)."""
        payload = {
            "suite": self.suite,
            "seed": self.seed,
            "config": self.config,
            "cases": self.cases,
            "version": wittlab.__version__,
        }
        return hashlib.sha256(_canonical_json(payload).encode()).hexdigest()

    def to_dict(self, with_timing=True):
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "config": self.config,
            "cases": self.cases,
            "aggregate": self.aggregate,
            "version": wittlab.__version__,
            "digest": self.digest(),
        }
        if with_timing and self.wallclock is not None:
            out["wallclock_s"] = round(self.wallclock, 3)
        return out

    def to_json(self, with_timing=True):
        return json.dumps(self.to_dict(with_timing=with_timing), sort_keys=True,
                          indent=2)


CSV_COLUMNS = ["suite", "case", "status", "critical", "inconclusive"]


def render_csv(report):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for c in report.cases:
        row = [report.suite, c["case"], c["status"],
               "1" if c["critical"] else "0",
               "1" if c["inconclusive"] else "0"]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def render_table(report):
    lines = []
    width = max([len(c["case"]) for c in report.cases] + [4])
    lines.append("suite %s  (%s)" % (report.suite, report.aggregate))
    lines.append("-" * (width + 24))
    for c in report.cases:
        flag = " CRITICAL" if c["critical"] else \
            (" inconclusive" if c["inconclusive"] else "")
        lines.append("%-*s  %s%s" % (width, c["case"], c["status"], flag))
    if report.wallclock is not None:
        lines.append("%d cases in %.2fs" % (len(report.cases),
                                            report.wallclock))
    return "\n".join(lines)


def parse_report_json(text):
    data = json.loads(text)
    rep = SuiteReport(data["suite"], seed=data.get("seed", 0),
                      config=data.get("config") or {})
    rep.cases = data["cases"]
    rep.wallclock = data.get("wallclock_s")
    return rep
