"""Shared record of acceptance outcomes, printed at the end of the run."""

LINES: list[str] = []


def record(number: int, ok: bool, title: str, detail: str = "") -> str:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    LINES.append(line)
    print(line)
    return line
