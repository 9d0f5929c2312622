"""Event logs and unit Earth Movers' Stochastic Conformance (uEMSC)."""

from __future__ import annotations

import csv
import io
import warnings
import xml.etree.ElementTree as ET
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .analysis import AnalysisConfig, trace_probability
from .errors import ParseError, SlpnWarning
from .net import LSP
from .reachability import build_reachability_graph

Trace = tuple[str, ...]


class XesWarning(SlpnWarning):
    pass


class StochasticLog:
    """Multiset of traces with positive integer counts."""

    def __init__(self, entries: Mapping[Iterable[str], int] | Iterable[tuple[Iterable[str], int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: Counter = Counter()
        for trace, n in items:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"trace count must be a positive integer, got {n!r}")
            acc[tuple(trace)] += n
        self.entries: dict[Trace, int] = dict(sorted(acc.items()))

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StochasticLog) and self.entries == other.entries

    def frequency(self, trace: Iterable[str]) -> Fraction:
        return Fraction(self.entries.get(tuple(trace), 0), self.total)

    def scaled(self, k: int) -> StochasticLog:
        return StochasticLog({t: n * k for t, n in self.entries.items()})

    def __repr__(self) -> str:
        return f"StochasticLog({self.entries!r})"


def parse_log_csv(text: str, trim: bool = False) -> StochasticLog:
    """Parse ``<count> ; <label>,<label>...`` lines (``<count> ;`` is the empty trace).

    Labels containing commas must be double-quoted. With ``trim`` labels are
    stripped of surrounding whitespace; otherwise they are kept verbatim.
    """
    acc: Counter = Counter()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        count_text, sep, rest = raw.partition(";")
        if not sep:
            raise ParseError("expected '<count> ; <labels>'", lineno)
        try:
            n = int(count_text.strip())
        except ValueError:
            raise ParseError(f"bad count {count_text.strip()!r}", lineno) from None
        if n < 1:
            raise ParseError(f"nonpositive count {n}", lineno)
        rest = rest.strip()
        if rest:
            try:
                (labels,) = list(csv.reader([rest], skipinitialspace=False, strict=True))
            except (csv.Error, ValueError) as exc:
                raise ParseError(f"malformed label list: {exc}", lineno) from None
            if trim:
                labels = [lab.strip() for lab in labels]
            if any(lab == "" for lab in labels):
                raise ParseError("empty label", lineno)
        else:
            labels = []
        acc[tuple(labels)] += n
    return StochasticLog(acc)


def write_log_csv(log: StochasticLog) -> str:
    buf = io.StringIO()
    for trace, n in log.entries.items():
        if trace:
            row = io.StringIO()
            csv.writer(row, lineterminator="").writerow(trace)
            buf.write(f"{n} ; {row.getvalue()}\n")
        else:
            buf.write(f"{n} ;\n")
    return buf.getvalue()


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(text: str | bytes, trim: bool = False) -> StochasticLog:
    """Read traces from XES, using only each event's ``concept:name``."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"XML syntax error: {exc}") from None
    acc: Counter = Counter()
    skipped = 0
    found = False
    for trace in root.iter():
        if _local(trace.tag) != "trace":
            continue
        found = True
        labels = []
        for event in trace:
            if _local(event.tag) != "event":
                continue
            name = None
            for attr in event:
                if _local(attr.tag) == "string" and attr.get("key") == "concept:name":
                    name = attr.get("value")
                    break
            if name is None:
                skipped += 1
                continue
            labels.append(name.strip() if trim else name)
        acc[tuple(labels)] += 1
    if not found:
        raise ParseError("no <trace> elements found")
    if skipped:
        warnings.warn(f"skipped {skipped} event(s) without concept:name", XesWarning, stacklevel=2)
    return StochasticLog(acc)


def load_log(path, xes: bool | None = None, trim: bool = False) -> StochasticLog:
    if xes is None:
        xes = str(path).lower().endswith(".xes")
    if xes:
        with open(path, "rb") as fh:
            return parse_xes(fh.read(), trim)
    with open(path, encoding="utf-8") as fh:
        return parse_log_csv(fh.read(), trim)


@dataclass(frozen=True)
class TraceRow:
    trace: Trace
    log_frequency: float
    model_probability: float
    contribution: float


@dataclass(frozen=True)
class UemscResult:
    value: float
    rows: tuple[TraceRow, ...]
    graph_states: int

    def as_dict(self) -> dict:
        return {
            "uemsc": self.value,
            "graph_states": self.graph_states,
            "traces": [
                {
                    "trace": list(r.trace),
                    "log": r.log_frequency,
                    "model": r.model_probability,
                    "contribution": r.contribution,
                }
                for r in self.rows
            ],
        }


def uemsc_report(log: StochasticLog, lsp: LSP, config: AnalysisConfig | None = None) -> UemscResult:
    """uEMSC with the per-trace breakdown, traces in lexicographic order."""
    config = config or AnalysisConfig()
    if log.total == 0:
        raise ValueError("empty log")
    sts = build_reachability_graph(lsp, config.max_states)
    rows = []
    excess = 0.0
    for trace in sorted(log.entries):
        freq = float(log.frequency(trace))
        prob = trace_probability(lsp, trace, config, sts).value
        gap = max(freq - prob, 0.0)
        excess += gap
        rows.append(TraceRow(trace, freq, prob, gap))
    return UemscResult(min(1.0, max(0.0, 1.0 - excess)), tuple(rows), len(sts))


def uemsc(log: StochasticLog, lsp: LSP, config: AnalysisConfig | None = None) -> float:
    return uemsc_report(log, lsp, config).value
