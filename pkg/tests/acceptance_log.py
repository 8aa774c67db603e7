"""Collects one verdict line per acceptance criterion for the terminal summary."""

RESULTS: list[str] = []


def record(number: int, title: str, failures: list, detail: str, elapsed: float, limit: float) -> bool:
    if elapsed > limit:
        failures = failures + [f"runtime {elapsed:.1f}s exceeds {limit:.0f}s"]
    ok = not failures
    text = detail if ok else "; ".join(str(f) for f in failures)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}) [{elapsed:.1f}s]: {text}"
    RESULTS.append(line)
    print(line)
    return ok
