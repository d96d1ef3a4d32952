"""
Colored terminal rendering of command reports.
"""

from typing import Iterable, List, Optional, Sequence

from colorama import Fore, Style, init

# Initialize colorama for cross-platform colored terminal output
init(autoreset=True)


class ReportDisplay:
    """
    Text rendering for the CLI: headers, sections, aligned key/value lines,
    tables and verdicts colored by outcome.
    """

    VERDICT_COLORS = {
        "match": Fore.GREEN,
        "pass": Fore.GREEN,
        "small": Fore.GREEN,
        "exists": Fore.GREEN,
        "invariant": Fore.GREEN,
        "inconclusive": Fore.YELLOW,
        "not_small": Fore.YELLOW,
        "mismatch": Fore.RED,
        "fail": Fore.RED,
        "invalid": Fore.RED,
        "variant": Fore.RED,
        "blow_up": Fore.RED,
        "error": Fore.RED,
    }

    ICONS = {
        "ok": "✅",
        "warning": "⚠️",
        "error": "❌",
        "info": "ℹ️",
    }

    def __init__(self, color: bool = True, width: int = 80):
        self.color = color
        self.width = width

    def _paint(self, text: str, color: str, bright: bool = False) -> str:
        if not self.color:
            return text
        return f"{Style.BRIGHT if bright else ''}{color}{text}{Style.RESET_ALL}"

    def verdict(self, verdict: str) -> str:
        base = verdict.split("(")[0]
        return self._paint(verdict, self.VERDICT_COLORS.get(base, Fore.WHITE), bright=True)

    def print_header(self, title: str):
        """Print a styled header"""
        print("\n" + "=" * self.width)
        print(self._paint(title.center(self.width), "", bright=True))
        print("=" * self.width + "\n")

    def print_section(self, title: str):
        """Print a section header"""
        print(f"\n{self._paint('─' * 40, Fore.WHITE, bright=True)}")
        print(f"  {self._paint(title, Fore.WHITE, bright=True)}")
        print(f"{self._paint('─' * 40, Fore.WHITE, bright=True)}\n")

    def key_values(self, pairs: Sequence[tuple]):
        if not pairs:
            return
        width = max(len(str(key)) for key, _ in pairs)
        for key, value in pairs:
            print(f"  {self._paint(str(key).ljust(width), Fore.CYAN)}  {value}")

    def table(self, headers: Sequence[str], rows: Iterable[Sequence[object]]):
        rows = [[str(cell) for cell in row] for row in rows]
        widths = [len(h) for h in headers]
        for row in rows:
            widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
        print("  " + "  ".join(self._paint(h.ljust(w), Fore.CYAN, bright=True) for h, w in zip(headers, widths)))
        print("  " + "  ".join("-" * w for w in widths))
        for row in rows:
            print("  " + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)))

    def lines(self, items: List[str], empty: str = "(none)"):
        if not items:
            print(f"  {self._paint(empty, Fore.LIGHTBLACK_EX)}")
        for item in items:
            print(f"  • {item}")

    def message(self, text: str, kind: str = "info"):
        colors = {"ok": Fore.GREEN, "warning": Fore.YELLOW, "error": Fore.RED, "info": Fore.WHITE}
        icon = self.ICONS.get(kind, self.ICONS["info"])
        print(f"\n{icon} {self._paint(text, colors.get(kind, Fore.WHITE))}")

    def summary(self, title: str, passed: int, failed: int, note: Optional[str] = None):
        total = passed + failed
        state = "pass" if failed == 0 else "fail"
        print(f"\n{self._paint(title, '', bright=True)}: {passed}/{total} passed  {self.verdict(state)}")
        if note:
            print(f"  {self._paint(note, Fore.LIGHTBLACK_EX)}")
