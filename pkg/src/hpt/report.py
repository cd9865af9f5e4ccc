"""Pass/fail bookkeeping shared by all the checkers."""

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: object = None
    detail: str = ""

    def as_dict(self):
        d = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if not self.passed:
            d["witness"] = _plain(self.witness)
            if self.detail:
                d["detail"] = self.detail
        return d


def _plain(x):
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, list):
        return [_plain(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return str(x)


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name, passed, witness=None, detail=""):
        self.checks.append(CheckResult(name, bool(passed), witness, detail))
        return bool(passed)

    def add_map_equal(self, name, lhs, rhs):
        """Record lhs == rhs for two GradedMaps, with the first differing
        basis element as witness."""
        if lhs == rhs:
            return self.add(name, True)
        return self.add(name, False, lhs.first_difference(rhs))

    def add_map_zero(self, name, m):
        return self.add(name, m.is_zero(), m.first_nonzero())

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(CheckResult(prefix + c.name, c.passed, c.witness, c.detail))
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self):
        return {"title": self.title,
                "status": "pass" if self.passed else "fail",
                "checks": [c.as_dict() for c in self.checks]}

    def __str__(self):
        lines = [f"{self.title}: {'pass' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            tail = "" if c.passed else f"  witness={c.witness!r}"
            lines.append(f"  {mark} {c.name}{tail}")
        return "\n".join(lines)
