"""Rule-based four-score sentiment over news text.

The scorer follows the published VADER rule set: lexicon valence lookup,
booster amplification with distance damping, negation flips, ALL-CAPS
emphasis, punctuation emphasis, but-clause reweighting, and the bounded
compound normalization x / sqrt(x^2 + 15). Scores keep full float
precision; rounding is left to presentation layers so the category
proportions always sum to one within float error.
"""

from __future__ import annotations

import csv
import math
import string
from dataclasses import dataclass
from importlib import resources
from types import MappingProxyType
from typing import Mapping

from .errors import ParseError

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733  # ALL-CAPS emphasis bump
N_SCALAR = -0.74  # negation flip-and-dampen factor

# damping of booster influence by distance from the scored word
_DAMPING = {1: 1.0, 2: 0.95, 3: 0.9}

DEFAULT_NEGATIONS = frozenset([
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
    "despite",
])

DEFAULT_BOOSTERS: Mapping[str, float] = MappingProxyType({
    "absolutely": B_INCR, "amazingly": B_INCR, "awfully": B_INCR,
    "completely": B_INCR, "considerable": B_INCR, "considerably": B_INCR,
    "decidedly": B_INCR, "deeply": B_INCR, "effing": B_INCR,
    "enormous": B_INCR, "enormously": B_INCR, "entirely": B_INCR,
    "especially": B_INCR, "exceptional": B_INCR, "exceptionally": B_INCR,
    "extreme": B_INCR, "extremely": B_INCR, "fabulously": B_INCR,
    "flipping": B_INCR, "flippin": B_INCR, "frackin": B_INCR,
    "fracking": B_INCR, "fricking": B_INCR, "frickin": B_INCR,
    "frigging": B_INCR, "friggin": B_INCR, "fully": B_INCR,
    "fuckin": B_INCR, "fucking": B_INCR, "fuggin": B_INCR,
    "fugging": B_INCR, "greatly": B_INCR, "hella": B_INCR, "highly": B_INCR,
    "hugely": B_INCR, "incredible": B_INCR, "incredibly": B_INCR,
    "intensely": B_INCR, "major": B_INCR, "majorly": B_INCR, "more": B_INCR,
    "most": B_INCR, "particularly": B_INCR, "purely": B_INCR, "quite": B_INCR,
    "really": B_INCR, "remarkably": B_INCR, "so": B_INCR,
    "substantially": B_INCR, "thoroughly": B_INCR, "total": B_INCR,
    "totally": B_INCR, "tremendous": B_INCR, "tremendously": B_INCR,
    "uber": B_INCR, "unbelievably": B_INCR, "unusually": B_INCR,
    "utter": B_INCR, "utterly": B_INCR, "very": B_INCR,
    "almost": B_DECR, "barely": B_DECR, "hardly": B_DECR,
    "just enough": B_DECR, "kind of": B_DECR, "kinda": B_DECR,
    "kindof": B_DECR, "kind-of": B_DECR, "less": B_DECR, "little": B_DECR,
    "marginal": B_DECR, "marginally": B_DECR, "occasional": B_DECR,
    "occasionally": B_DECR, "partly": B_DECR, "scarce": B_DECR,
    "scarcely": B_DECR, "slight": B_DECR, "slightly": B_DECR,
    "somewhat": B_DECR, "sort of": B_DECR, "sorta": B_DECR,
    "sortof": B_DECR, "sort-of": B_DECR,
})

SPECIAL_IDIOMS: Mapping[str, float] = MappingProxyType({
    "the shit": 3.0, "the bomb": 3.0, "bad ass": 1.5, "badass": 1.5,
    "yeah right": -2.0, "kiss of death": -1.5, "to die for": 3.0,
})


@dataclass(frozen=True)
class SentimentVector:
    neg: float
    neu: float
    pos: float
    compound: float

    def __post_init__(self):
        for name in ("neg", "neu", "pos"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not -1.0 <= self.compound <= 1.0:
            raise ValueError(f"compound must be in [-1, 1], got {self.compound}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.neg, self.neu, self.pos, self.compound)


NEUTRAL_DAY = SentimentVector(0.0, 1.0, 0.0, 0.0)
EMPTY_TEXT = SentimentVector(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, float]
    boosters: Mapping[str, float] = DEFAULT_BOOSTERS
    negations: frozenset = DEFAULT_NEGATIONS

    def __post_init__(self):
        for token, v in self.entries.items():
            if not math.isfinite(v) or not -4.0 <= v <= 4.0:
                raise ValueError(f"valence for {token!r} must be finite in [-4, 4]")
        for token, inc in self.boosters.items():
            if not 0.0 < abs(inc) <= 1.0:
                raise ValueError(f"booster increment for {token!r} must have magnitude in (0, 1]")


def load_lexicon(path=None) -> SentimentLexicon:
    """Read a TSV lexicon (token, valence, rest ignored); default is bundled."""
    if path is None:
        text = resources.files("oilcast.assets").joinpath(
            "sentiment_lexicon.tsv").read_text()
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError("expected token<TAB>valence", line=lineno)
        try:
            entries[parts[0]] = float(parts[1])
        except ValueError:
            raise ParseError(f"bad valence {parts[1]!r}", line=lineno) from None
    return SentimentLexicon(entries=entries)


def _tokens(text: str) -> list[str]:
    """Whitespace tokens with outer punctuation stripped.

    A token whose stripped form has two or fewer characters is kept
    verbatim so emoticons and short forms survive.
    """
    out = []
    for raw in text.split():
        stripped = raw.strip(string.punctuation)
        out.append(raw if len(stripped) <= 2 else stripped)
    return out


def _mixed_caps(tokens) -> bool:
    upper = sum(1 for t in tokens if t.isupper())
    return 0 < len(tokens) - upper < len(tokens)


def _is_negation(word: str, negations) -> bool:
    return word in negations or "n't" in word


def _booster_effect(word: str, valence: float, cap_diff: bool, boosters) -> float:
    low = word.lower()
    if low not in boosters:
        return 0.0
    scalar = boosters[low]
    if valence < 0:
        scalar = -scalar
    if word.isupper() and cap_diff:
        scalar += C_INCR if valence > 0 else -C_INCR
    return scalar


def _negation_adjust(valence, lows, distance, i, negations):
    if distance == 1:
        if _is_negation(lows[i - 1], negations):
            valence *= N_SCALAR
    elif distance == 2:
        if lows[i - 2] == "never" and lows[i - 1] in ("so", "this"):
            valence *= 1.25
        elif lows[i - 2] == "without" and lows[i - 1] == "doubt":
            pass
        elif _is_negation(lows[i - 2], negations):
            valence *= N_SCALAR
    else:
        # matches the published rule's precedence: a bare "so"/"this" right
        # before the word also triggers the intensifier at this distance
        if (lows[i - 3] == "never" and lows[i - 2] in ("so", "this")) or lows[
            i - 1
        ] in ("so", "this"):
            valence *= 1.25
        elif lows[i - 3] == "without" and "doubt" in (lows[i - 2], lows[i - 1]):
            pass
        elif _is_negation(lows[i - 3], negations):
            valence *= N_SCALAR
    return valence


def _idiom_adjust(valence, lows, i, boosters):
    onezero = f"{lows[i - 1]} {lows[i]}"
    twoonezero = f"{lows[i - 2]} {lows[i - 1]} {lows[i]}"
    twoone = f"{lows[i - 2]} {lows[i - 1]}"
    threetwoone = f"{lows[i - 3]} {lows[i - 2]} {lows[i - 1]}"
    threetwo = f"{lows[i - 3]} {lows[i - 2]}"
    for seq in (onezero, twoonezero, twoone, threetwoone, threetwo):
        if seq in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[seq]
            break
    if i + 1 < len(lows):
        zeroone = f"{lows[i]} {lows[i + 1]}"
        if zeroone in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[zeroone]
    if i + 2 < len(lows):
        zeroonetwo = f"{lows[i]} {lows[i + 1]} {lows[i + 2]}"
        if zeroonetwo in SPECIAL_IDIOMS:
            valence = SPECIAL_IDIOMS[zeroonetwo]
    for ngram in (threetwoone, threetwo, twoone):
        if ngram in boosters:
            valence += boosters[ngram]
    return valence


def _least_adjust(valence, lows, i, entries):
    if i > 1 and lows[i - 1] not in entries and lows[i - 1] == "least":
        if lows[i - 2] not in ("at", "very"):
            valence *= N_SCALAR
    elif i > 0 and lows[i - 1] not in entries and lows[i - 1] == "least":
        valence *= N_SCALAR
    return valence


def _valence_at(tokens, lows, i, lexicon: SentimentLexicon, cap_diff: bool) -> float:
    low = lows[i]
    if low not in lexicon.entries:
        return 0.0
    valence = lexicon.entries[low]
    # "no" before another lexicon word acts as a negator, not a score
    if low == "no" and i + 1 < len(tokens) and lows[i + 1] in lexicon.entries:
        valence = 0.0
    if (
        (i > 0 and lows[i - 1] == "no")
        or (i > 1 and lows[i - 2] == "no")
        or (i > 2 and lows[i - 3] == "no" and lows[i - 1] in ("or", "nor"))
    ):
        valence = lexicon.entries[low] * N_SCALAR
    if tokens[i].isupper() and cap_diff:
        valence += C_INCR if valence > 0 else -C_INCR
    for distance in (1, 2, 3):
        if i < distance:
            break
        # modifiers that are themselves lexicon words score on their own
        if lows[i - distance] in lexicon.entries:
            continue
        effect = _booster_effect(tokens[i - distance], valence, cap_diff,
                                 lexicon.boosters)
        valence += effect * _DAMPING[distance]
        valence = _negation_adjust(valence, lows, distance, i, lexicon.negations)
        if distance == 3:
            valence = _idiom_adjust(valence, lows, i, lexicon.boosters)
    return _least_adjust(valence, lows, i, lexicon.entries)


def _but_reweight(lows, vals):
    """Halve sentiment before a contrastive 'but', amplify what follows."""
    if "but" not in lows:
        return vals
    bi = lows.index("but")
    return [
        v * 0.5 if i < bi else (v * 1.5 if i > bi else v)
        for i, v in enumerate(vals)
    ]


def _punctuation_emphasis(text: str) -> float:
    bangs = min(text.count("!"), 4)
    amp = bangs * 0.292
    qs = text.count("?")
    if qs > 1:
        amp += qs * 0.18 if qs <= 3 else 0.96
    return amp


def _normalize(score: float, alpha: float = 15.0) -> float:
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def score_text(text: str, lexicon: SentimentLexicon) -> SentimentVector:
    """Score one text; empty or token-free input yields the all-zero vector."""
    tokens = _tokens(text)
    if not tokens:
        return EMPTY_TEXT
    lows = [t.lower() for t in tokens]
    cap_diff = _mixed_caps(tokens)

    vals = []
    for i in range(len(tokens)):
        low = lows[i]
        if low in lexicon.boosters or (
            low == "kind" and i + 1 < len(tokens) and lows[i + 1] == "of"
        ):
            vals.append(0.0)
            continue
        vals.append(_valence_at(tokens, lows, i, lexicon, cap_diff))
    vals = _but_reweight(lows, vals)

    total = sum(vals)
    amp = _punctuation_emphasis(text)
    if total > 0:
        total += amp
    elif total < 0:
        total -= amp
    compound = _normalize(total)

    pos_sum = sum(v + 1.0 for v in vals if v > 0)  # +1 balances neutral counts
    neg_sum = sum(v - 1.0 for v in vals if v < 0)
    neu_count = sum(1 for v in vals if v == 0)
    if pos_sum > abs(neg_sum):
        pos_sum += amp
    elif pos_sum < abs(neg_sum):
        neg_sum -= amp
    denom = pos_sum + abs(neg_sum) + neu_count
    return SentimentVector(
        neg=abs(neg_sum) / denom,
        neu=neu_count / denom,
        pos=pos_sum / denom,
        compound=compound,
    )


def aggregate_daily(scores) -> SentimentVector:
    """Elementwise mean over a day's scores; a day with no news is neutral."""
    scores = list(scores)
    if not scores:
        return NEUTRAL_DAY
    n = len(scores)
    return SentimentVector(
        neg=sum(s.neg for s in scores) / n,
        neu=sum(s.neu for s in scores) / n,
        pos=sum(s.pos for s in scores) / n,
        compound=sum(s.compound for s in scores) / n,
    )


def write_daily_csv(path, rows) -> None:
    """Rows of (date, SentimentVector) to CSV with a fixed header."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["date", "neg", "neu", "pos", "compound"])
        for date, vec in rows:
            writer.writerow([date, repr(vec.neg), repr(vec.neu),
                             repr(vec.pos), repr(vec.compound)])


def read_daily_csv(path) -> list[tuple[str, SentimentVector]]:
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["date", "neg", "neu", "pos", "compound"]:
            raise ParseError(f"unexpected header {header}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 5:
                raise ParseError("expected 5 columns", line=lineno)
            try:
                vec = SentimentVector(float(row[1]), float(row[2]),
                                      float(row[3]), float(row[4]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            out.append((row[0], vec))
    return out
