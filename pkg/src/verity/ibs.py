"""Interpolative binning: raw metric values onto the 0-5 Likert scale.

A table classifies a raw value into one of five agreement bins and then
interpolates linearly between that bin's raw edges onto the category's
score band (0.0-1.0, 1.1-2.0, 2.1-3.0, 3.1-4.0, 4.1-5.0); the worked
anchor is ssim 0.45 -> 3.1 + (4.0-3.1)/(0.6-0.3) * 0.15 = 3.55.  Raw
gaps between bins interpolate linearly between the neighbouring band
edges, so the map stays monotone in the table's declared direction;
bins that touch step 0.1 at the shared edge (the better band wins
there).  Values beyond the extreme anchors clamp into [0, 5].
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError

__all__ = [
    "LIKERT_LABELS",
    "SCORE_FLOORS",
    "IbsBin",
    "IbsTable",
    "builtin_tables",
    "load_ibs_tables",
    "default_table_path",
    "ibs_scale",
    "likert_of_score",
]

LIKERT_LABELS = (
    "Strongly Disagree",
    "Somewhat Disagree",
    "Neutral",
    "Somewhat Agree",
    "Strongly Agree",
)
SCORE_FLOORS = (0.0, 1.1, 2.1, 3.1, 4.1)
SCORE_CEILS = (1.0, 2.0, 3.0, 4.0, 5.0)
_LABEL_KEYS = {lbl.lower().replace(" ", "_"): lbl for lbl in LIKERT_LABELS}


@dataclass(frozen=True)
class IbsBin:
    """One agreement category: raw-value edges plus the category's score
    floor.  An edge of None is open toward the table's extremum."""

    label: str
    raw_lo: float | None
    raw_hi: float | None
    score_lo: float

    def __post_init__(self):
        if self.label not in LIKERT_LABELS:
            raise ConfigError(f"unknown bin label {self.label!r}")
        if self.score_lo not in SCORE_FLOORS:
            raise ConfigError(f"bin {self.label!r}: score floor {self.score_lo} not allowed")
        if self.raw_lo is not None and self.raw_hi is not None and not self.raw_lo < self.raw_hi:
            raise ConfigError(f"bin {self.label!r}: raw_lo must be below raw_hi")


@dataclass(frozen=True)
class IbsTable:
    """Ordered bins for one metric plus extremum anchors.

    ``saturation`` is the raw value mapped to 5.0 when the best bin is
    open on its far side; ``floor_anchor`` is the raw value mapped to 0.0
    when the worst bin is open.
    """

    metric: str
    direction: str  # "higher" | "lower"
    bins: tuple[IbsBin, ...]
    saturation: float | None = None
    floor_anchor: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(self.bins))
        if self.direction not in ("higher", "lower"):
            raise ConfigError(f"{self.metric}: unknown direction {self.direction!r}")
        labels = [b.label for b in self.bins]
        if sorted(labels) != sorted(LIKERT_LABELS):
            raise ConfigError(f"{self.metric}: need exactly one bin per Likert category")
        object.__setattr__(self, "_anchors", self._build_anchors())

    def _ordered_bins(self) -> list[IbsBin]:
        # Worst-to-best category order regardless of how bins were supplied.
        return sorted(self.bins, key=lambda b: b.score_lo)

    def _build_anchors(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """(raws, scores) sorted by raw; linear interpolation between
        consecutive anchors realizes the full piecewise map.

        Each bin contributes its two raw edges anchored at the category's
        score floor and ceiling; open edges borrow the table's extremum
        anchors.  Touching bins produce a duplicated raw whose two scores
        form the 0.1 step between bands.
        """
        pts: list[tuple[float, float]] = []
        ordered = self._ordered_bins()
        for i, b in enumerate(ordered):
            s_lo = b.score_lo
            s_hi = SCORE_CEILS[i]
            if self.direction == "higher":
                lo = b.raw_lo if b.raw_lo is not None else self.floor_anchor
                hi = b.raw_hi if b.raw_hi is not None else self.saturation
            else:
                # Lower-is-better: the smaller raw edge takes the better score.
                lo = b.raw_lo if b.raw_lo is not None else self.saturation
                hi = b.raw_hi if b.raw_hi is not None else self.floor_anchor
            if lo is None or hi is None:
                raise ConfigError(
                    f"{self.metric}: bin {b.label!r} is open but the table "
                    "lacks the matching extremum anchor"
                )
            if self.direction == "higher":
                pts.append((lo, s_lo))
                pts.append((hi, s_hi))
            else:
                pts.append((lo, s_hi))
                pts.append((hi, s_lo))
        increasing = self.direction == "higher"
        pts.sort(key=lambda t: (t[0], t[1] if increasing else -t[1]))
        raws: list[float] = []
        scores: list[float] = []
        for raw, score in pts:
            if raws and raw == raws[-1] and score == scores[-1]:
                continue
            raws.append(raw)
            scores.append(score)
        for a, b in zip(scores, scores[1:]):
            ok = a <= b if increasing else a >= b
            if not ok:
                raise ConfigError(f"{self.metric}: bins overlap or are mis-ordered")
        return tuple(raws), tuple(scores)


def ibs_scale(table: IbsTable, raw: float) -> float:
    """Map a raw metric value onto [0, 5] through the table's bins."""
    if not math.isfinite(raw):
        raise ValueError(f"raw value must be finite, got {raw!r}")
    raws, scores = table._anchors  # noqa: SLF001 - private to this module
    if raw <= raws[0]:
        return max(scores[k] for k in range(len(raws)) if raws[k] == raws[0])
    if raw >= raws[-1]:
        return max(scores[k] for k in range(len(raws)) if raws[k] == raws[-1])
    j = bisect.bisect_right(raws, raw)
    if raws[j - 1] == raw:
        # Exact edge hit; a duplicated raw marks a band step, where the
        # better category wins.
        return max(s for r, s in zip(raws, scores) if r == raw)
    span = raws[j] - raws[j - 1]
    t = (raw - raws[j - 1]) / span
    return scores[j - 1] + (scores[j] - scores[j - 1]) * t


def likert_of_score(score: float) -> str:
    """Likert label of a 0-5 score; band edges are inclusive on their lower
    bound (4.1 is already 'Strongly Agree')."""
    if not 0.0 <= score <= 5.0:
        raise ValueError(f"score must lie in [0, 5], got {score!r}")
    for label, ceil in zip(LIKERT_LABELS[:-1], SCORE_FLOORS[1:]):
        if score < ceil:
            return label
    return LIKERT_LABELS[-1]


def _table(metric, direction, rows, saturation=None, floor_anchor=None) -> IbsTable:
    bins = tuple(
        IbsBin(label=lbl, raw_lo=lo, raw_hi=hi, score_lo=floor)
        for (lbl, floor), (lo, hi) in zip(zip(LIKERT_LABELS, SCORE_FLOORS), rows)
    )
    return IbsTable(
        metric=metric,
        direction=direction,
        bins=bins,
        saturation=saturation,
        floor_anchor=floor_anchor,
    )


def builtin_tables() -> dict[str, IbsTable]:
    """Default bin tables for ssim, psnr, fid, nfss, lpips, and is.

    Open-ended bins anchor their far edge at a declared extremum: the fid
    and lpips best bins reach 5.0 at raw 0, psnr saturates at 60 dB, the
    diversity score at a class-count cap of 10, and the fid worst bin
    bottoms out at raw 300.
    """
    tables = {
        "ssim": _table(
            "ssim",
            "higher",
            [(-1.0, -0.6), (-0.5, -0.2), (-0.1, 0.2), (0.3, 0.6), (0.7, 1.0)],
        ),
        "psnr": _table(
            "psnr",
            "higher",
            [(0.0, 7.0), (8.0, 15.0), (16.0, 23.0), (24.0, 31.0), (32.0, None)],
            saturation=60.0,
        ),
        "fid": _table(
            "fid",
            "lower",
            [(150.0, None), (100.0, 149.0), (31.0, 99.0), (11.0, 30.0), (None, 10.0)],
            saturation=0.0,
            floor_anchor=300.0,
        ),
        "nfss": _table(
            "nfss",
            "higher",
            [(-1.0, -0.6), (-0.5, -0.2), (-0.1, 0.2), (0.3, 0.6), (0.7, 1.0)],
        ),
        "lpips": _table(
            "lpips",
            "lower",
            [(0.9, 1.0), (0.7, 0.8), (0.5, 0.6), (0.3, 0.4), (0.0, 0.2)],
        ),
        "is": _table(
            "is",
            "higher",
            [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0), (3.0, 5.0), (6.0, None)],
            saturation=10.0,
        ),
    }
    return tables


def default_table_path() -> Path:
    """Path of the packaged table file (same content as the builtins)."""
    return Path(resources.files("verity").joinpath("data/ibs_tables.txt"))


def _parse_edge(tok: str, metric: str, lineno: int) -> float | None:
    if tok.lower() in ("open", "inf", "+inf", "-inf"):
        return None
    try:
        return float(tok)
    except ValueError:
        raise ConfigError(f"{metric or '<table file>'}: line {lineno}: bad edge {tok!r}") from None


def load_ibs_tables(path) -> dict[str, IbsTable]:
    """Parse a table file.

    Line-based format, '#' comments allowed::

        metric fid
        direction lower
        saturation 0
        floor 300
        bin strongly_agree open 10
        bin somewhat_agree 11 30
        ...

    Bin labels are the Likert categories in snake_case; an edge of ``open``
    points at the table's extremum anchor.  Category score floors are fixed
    by the scale itself and never appear in the file.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read ({exc})") from exc

    tables: dict[str, IbsTable] = {}
    current: dict | None = None

    def finish(block: dict | None):
        if block is None:
            return
        metric = block["metric"]
        seen = [b.label for b in block["bins"]]
        for lbl in LIKERT_LABELS:
            if seen.count(lbl) > 1:
                raise ConfigError(f"{metric}: duplicate bin for category {lbl!r}")
            if seen.count(lbl) == 0:
                raise ConfigError(f"{metric}: missing bin for category {lbl!r}")
        if block["direction"] is None:
            raise ConfigError(f"{metric}: missing direction")
        tables[metric] = IbsTable(
            metric=metric,
            direction=block["direction"],
            bins=tuple(block["bins"]),
            saturation=block["saturation"],
            floor_anchor=block["floor"],
        )

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key = toks[0].lower()
        if key == "metric":
            if len(toks) != 2:
                raise ConfigError(f"{p}: line {lineno}: expected 'metric <name>'")
            finish(current)
            current = {
                "metric": toks[1].lower(),
                "direction": None,
                "saturation": None,
                "floor": None,
                "bins": [],
            }
            continue
        if current is None:
            raise ConfigError(f"{p}: line {lineno}: content before any 'metric' line")
        metric = current["metric"]
        if key == "direction":
            if len(toks) != 2 or toks[1] not in ("higher", "lower"):
                raise ConfigError(f"{metric}: line {lineno}: direction must be higher|lower")
            current["direction"] = toks[1]
        elif key in ("saturation", "floor"):
            if len(toks) != 2:
                raise ConfigError(f"{metric}: line {lineno}: expected '{key} <value>'")
            current[key] = float(toks[1])
        elif key == "bin":
            if len(toks) != 4:
                raise ConfigError(f"{metric}: line {lineno}: expected 'bin <label> <lo> <hi>'")
            label = _LABEL_KEYS.get(toks[1].lower())
            if label is None:
                raise ConfigError(f"{metric}: line {lineno}: unknown category {toks[1]!r}")
            lo = _parse_edge(toks[2], metric, lineno)
            hi = _parse_edge(toks[3], metric, lineno)
            score_lo = SCORE_FLOORS[LIKERT_LABELS.index(label)]
            current["bins"].append(IbsBin(label=label, raw_lo=lo, raw_hi=hi, score_lo=score_lo))
        else:
            raise ConfigError(f"{p}: line {lineno}: unknown key {toks[0]!r}")
    finish(current)
    if not tables:
        raise ConfigError(f"{p}: no tables defined")
    return tables
