"""Collects one verdict per acceptance criterion so the session summary can list them."""
RESULTS: dict = {}


def record(number: int, title: str, passed: bool, detail: str, elapsed: float, limit: float) -> str:
    within = elapsed < limit
    ok = bool(passed and within)
    line = (f"CRITERION {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}; "
            f"{elapsed:.3g} s (limit {limit:g} s{'' if within else ', exceeded'})")
    RESULTS[number] = line
    print(line)
    return line
