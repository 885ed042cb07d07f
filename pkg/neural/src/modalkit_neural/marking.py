"""Input-stream construction: span markers, trigger masking, label vocab."""

from __future__ import annotations

TRIGGER_OPEN = "<t>"
TRIGGER_CLOSE = "</t>"
HEAD_OPEN = "<h>"
HEAD_CLOSE = "</h>"
MARKERS = [TRIGGER_OPEN, TRIGGER_CLOSE, HEAD_OPEN, HEAD_CLOSE]

_PAIRS = {"trigger": (TRIGGER_OPEN, TRIGGER_CLOSE), "head": (HEAD_OPEN, HEAD_CLOSE)}


def mark_spans(
    forms: list[str], spans: list[tuple[tuple[int, int], str]]
) -> tuple[list[str], list[int | None]]:
    """Insert role markers around spans.

    Returns the marked word stream and an alignment mapping each marked
    position to its original index (None for inserted markers). Spans
    must be in bounds and non-overlapping.
    """
    n = len(forms)
    covered: set[int] = set()
    opens: dict[int, list[str]] = {}
    closes: dict[int, list[str]] = {}
    for (start, end), role in sorted(spans, key=lambda s: s[0]):
        if role not in _PAIRS:
            raise ValueError(f"unknown span role {role!r}")
        if not (0 <= start <= end < n):
            raise ValueError(f"span ({start}, {end}) out of bounds for {n} tokens")
        positions = set(range(start, end + 1))
        if positions & covered:
            raise ValueError(f"span ({start}, {end}) overlaps another marked span")
        covered |= positions
        o, c = _PAIRS[role]
        opens.setdefault(start, []).append(o)
        closes.setdefault(end, []).append(c)
    marked: list[str] = []
    alignment: list[int | None] = []
    for i, form in enumerate(forms):
        for o in opens.get(i, ()):
            marked.append(o)
            alignment.append(None)
        marked.append(f"\\{form}" if form in MARKERS else form)
        alignment.append(i)
        for c in closes.get(i, ()):
            marked.append(c)
            alignment.append(None)
    return marked, alignment


def mask_spans(forms: list[str], spans: list[tuple[int, int]], mask_token: str) -> list[str]:
    """Replace every token inside the spans with the encoder's mask symbol."""
    out = list(forms)
    for start, end in spans:
        for i in range(start, end + 1):
            out[i] = mask_token
    for (start, end) in spans:
        for i in range(start, end + 1):
            assert out[i] == mask_token
    return out


def assert_masked(stream: list[str], original_forms: list[str],
                  spans: list[tuple[int, int]]) -> None:
    """Sanity check: no trigger surface form survives in a masked stream."""
    surface = {original_forms[i] for s, e in spans for i in range(s, e + 1)}
    leaked = [w for w in stream if w in surface]
    if leaked:
        raise AssertionError(f"masked input leaks trigger forms: {leaked}")


# ---------------------------------------------------------------------------
# tag vocabularies per scheme


_GRANULARITY_LABELS = {
    "binary": [],
    "coarse": ["priority", "plausibility"],
    "fine_conflated": ["rules_norms", "intentions", "knowledge", "world", "agent"],
    "fine_full": ["rules_norms", "desires_wishes", "plans_goals",
                  "knowledge", "world", "agent"],
}


def sense_labels(granularity: str) -> list[str]:
    if granularity not in _GRANULARITY_LABELS:
        raise ValueError(f"unknown granularity {granularity!r}")
    return list(_GRANULARITY_LABELS[granularity])


def parse_scheme_string(scheme: str) -> tuple[str, str]:
    """Split a scheme string into (kind, granularity)."""
    kind, _, gran = scheme.partition(":")
    if kind in ("event_span", "event_head"):
        return kind, "binary"
    if gran == "nosense":
        gran = "binary"
    return kind, (gran or "fine_conflated")


def tag_vocabulary(scheme: str) -> list[str]:
    """The full closed tag set for a scheme, in a fixed deterministic order."""
    kind, gran = parse_scheme_string(scheme)
    labels = sense_labels(gran)
    tags = ["O"]
    if kind in ("trigger_biose", "trigger_biose_feat_head", "trigger_biose_plus_head"):
        suffixes = [f"-{l}" for l in labels] or [""]
        for prefix in ("S", "B", "I", "E"):
            tags.extend(f"{prefix}{suffix}" for suffix in suffixes)
        if kind == "trigger_biose_plus_head":
            tags.append("H")
    elif kind == "event_span":
        tags.extend(["B-E", "I-E"])
    elif kind == "event_head":
        tags.append("H")
    elif kind == "joint":
        roles = [f"T-{l}" for l in labels] or ["T"]
        for prefix in ("B", "I"):
            tags.extend(f"{prefix}-{r}" for r in roles)
        tags.extend(["B-E", "I-E"])
    else:
        raise ValueError(f"unknown scheme kind {kind!r}")
    return tags
