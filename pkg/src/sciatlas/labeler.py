"""Cluster labeling: noun-phrase candidates scored by frequency vs specificity.

Candidate terms are noun phrases (adjectives followed by nouns, ending with a
noun) pulled from level-specific bibliographic fields. A term's relevance to
a cluster balances how often it occurs there against how concentrated it is
there:

    score = tf_c**alpha * (tf_c / tf_total)**(1 - alpha)

so alpha=1 ranks by raw frequency and alpha=0 by the specificity ratio.

Part-of-speech tagging is a small lexicon plus suffix heuristics; it trades
accuracy for zero dependencies and can be bypassed entirely with pre-tagged
input (token/tag pairs per field, Penn-style or coarse ADJ/NOUN tags).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .leiden import ClusterTree

TEXT_FIELDS = ("title", "mesh_terms", "journal_title", "author_addresses")

DEFAULT_MIN_TF = 2
DEFAULT_MAX_PHRASE_LEN = 4

_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9'-]*")
# phrases must not span clause punctuation
_SEGMENT_RE = re.compile(r"[,;:.!?()\[\]{}<>/|&\"]|\s[-–—]\s")

# Closed-class words the tagger should never treat as phrase material.
_FUNCTION_WORDS = frozenset("""
a an the this that these those some any each every no all both few many much
and or but nor so yet if while because although though since unless until
of in on at by for with from to into onto over under between among through
during against about across behind beyond within without along around near
is are was were be been being am has have had having do does did done doing
can could may might must shall should will would not only very too also just
than then when where which who whom whose what why how there here it its itself
we our us you your they their them he his him she her i my me as per via versus
et al vs ie eg etc more most less least other another such same own several
""".split())

# Frequent adjectives whose suffixes the heuristics miss.
_ADJECTIVE_WORDS = frozenset("""
acute chronic malignant benign severe mild novel human animal adult early late
high low new old long short large small deep rapid slow major minor multiple
single double common rare complex simple open closed randomized randomised
left right upper lower total partial primary secondary tertiary distal proximal
anterior posterior lateral medial oral nasal renal hepatic cardiac neural
clinical surgical medical dental mental viral bacterial fungal genetic
molecular cellular digital global local social public private general special
""".split())

# Nouns that look adjectival by suffix (or would be mangled by it).
_NOUN_EXCEPTIONS = frozenset("""
patient hospital trial survival interval protocol signal animal material
potential differential individual professional journal criterion datum
disease increase decrease release base case dose rose nose cause course
""".split())

_ADJ_SUFFIXES = ("al", "ic", "ous", "ive", "ary", "ory", "ful", "less",
                 "able", "ible", "ish", "like")

_IRREGULAR_PLURALS = {
    "children": "child", "women": "woman", "men": "man", "feet": "foot",
    "teeth": "tooth", "mice": "mouse", "lice": "louse", "geese": "goose",
    "criteria": "criterion", "phenomena": "phenomenon", "bacteria": "bacterium",
    "fungi": "fungus", "nuclei": "nucleus", "stimuli": "stimulus",
    "indices": "index", "matrices": "matrix", "vertices": "vertex",
    "analyses": "analysis", "diagnoses": "diagnosis", "prognoses": "prognosis",
    "hypotheses": "hypothesis", "data": "data", "media": "media",
}

# -us nouns whose plural ends in -uses (vs. ordinary -e?s plurals like "causes").
_US_NOUNS = frozenset(
    "virus status fetus bonus census consensus sinus uterus thymus".split())


class LabelError(Exception):
    pass


@dataclass(frozen=True)
class ClusterLabel:
    label: str
    additional_terms: tuple[str, ...] = ()


@dataclass
class LabelConfig:
    """Fields and alpha per level; unknown field names are an error."""

    fields: dict[str, list[str]] = field(default_factory=lambda: {
        "topic": ["title", "mesh_terms"],
        "specialty": ["title", "mesh_terms", "journal_title"],
        "discipline": ["journal_title", "author_addresses"],
        "research_area": ["journal_title", "author_addresses"],
    })
    alpha: dict[str, float] = field(default_factory=lambda: {
        "topic": 0.33,
        "specialty": 0.5,
        "discipline": 0.67,
        "research_area": 0.67,
    })
    min_tf: int = DEFAULT_MIN_TF
    max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN

    def __post_init__(self) -> None:
        for level, names in self.fields.items():
            for name in names:
                if name not in TEXT_FIELDS:
                    raise LabelError(f"unknown field {name!r} for level {level!r}")
        for level, a in self.alpha.items():
            if not 0.0 <= a <= 1.0:
                raise LabelError(f"alpha for {level!r} must be in [0, 1]")


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        text = resources.files("sciatlas.data").joinpath("stoplist.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    terms = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            terms.add(line)
    return frozenset(terms)


# ---------------------------------------------------------------------------
# Tagging, lemmatization, phrase extraction
# ---------------------------------------------------------------------------


def tag_token(token: str) -> str:
    """Coarse tag: 'ADJ', 'NOUN' or 'OTHER'."""
    if token in _FUNCTION_WORDS:
        return "OTHER"
    if token in _NOUN_EXCEPTIONS:
        return "NOUN"
    if token in _ADJECTIVE_WORDS:
        return "ADJ"
    if len(token) > 3 and token.endswith(_ADJ_SUFFIXES):
        return "ADJ"
    return "NOUN"


def lemmatize_noun(token: str) -> str:
    """Rule-based plural stripping; leaves non-plural forms alone."""
    if token in _IRREGULAR_PLURALS:
        return _IRREGULAR_PLURALS[token]
    if len(token) <= 3 or not token.endswith("s"):
        return token
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if len(token) >= 7 and token.endswith(("oses", "eses", "yses")):
        return token[:-2] + "is"
    if token.endswith("uses") and token[:-2] in _US_NOUNS:
        return token[:-2]
    if token.endswith(("ches", "shes", "sses", "xes", "zes")):
        return token[:-2]
    if token.endswith(("ss", "us", "is")):
        return token
    return token[:-1]


def _tagged_tokens(text: str) -> list[tuple[str, str]]:
    tokens = _TOKEN_RE.findall(text.lower())
    return [(t, tag_token(t)) for t in tokens]


def normalize_tag(tag: str) -> str:
    tag = tag.upper()
    if tag.startswith("JJ") or tag == "ADJ":
        return "ADJ"
    if tag.startswith("NN") or tag == "NOUN":
        return "NOUN"
    return "OTHER"


def phrases_from_tagged(
    tagged: list[tuple[str, str]],
    max_len: int = DEFAULT_MAX_PHRASE_LEN,
) -> list[str]:
    """Maximal adjective*-noun+ spans plus their noun-final suffixes."""
    out: list[str] = []
    i = 0
    n = len(tagged)
    while i < n:
        tag = normalize_tag(tagged[i][1])
        if tag == "OTHER":
            i += 1
            continue
        # consume adjectives, then nouns
        start = i
        while i < n and normalize_tag(tagged[i][1]) == "ADJ":
            i += 1
        noun_start = i
        while i < n and normalize_tag(tagged[i][1]) == "NOUN":
            i += 1
        if i == noun_start:  # adjectives with no noun head
            continue
        words = [tagged[j][0].lower() for j in range(start, i)]
        for j in range(noun_start, i):
            words[j - start] = lemmatize_noun(words[j - start])
        for s in range(len(words)):
            if len(words) - s <= max_len:
                out.append(" ".join(words[s:]))
    return out


def extract_noun_phrases(text: str, max_len: int = DEFAULT_MAX_PHRASE_LEN) -> list[str]:
    """Extract lemmatized, lowercased noun phrases from free text."""
    if not text:
        return []
    out: list[str] = []
    for segment in _SEGMENT_RE.split(text.lower()):
        if segment and not segment.isspace():
            out.extend(phrases_from_tagged(_tagged_tokens(segment), max_len=max_len))
    return out


# ---------------------------------------------------------------------------
# Scoring and label assembly
# ---------------------------------------------------------------------------


def tfs_score(tf_c: float, tf_total: float, alpha: float) -> float:
    """tf_c**alpha * (tf_c / tf_total)**(1 - alpha); zero counts score 0."""
    if tf_c <= 0:
        return 0.0
    if not 0.0 <= alpha <= 1.0:
        raise LabelError("alpha must be in [0, 1]")
    if tf_c > tf_total:
        raise LabelError("cluster count exceeds corpus-wide count")
    return tf_c ** alpha * (tf_c / tf_total) ** (1.0 - alpha)


def label_cluster(
    cluster_id: str,
    cluster_tf: dict[str, int],
    total_tf: dict[str, int],
    alpha: float,
    stoplist: frozenset[str] = frozenset(),
    min_tf: int = DEFAULT_MIN_TF,
) -> ClusterLabel:
    """Top-3 terms joined by '; ' plus up to seven runner-up terms.

    Ranking is by score descending, ties broken by higher cluster frequency
    then alphabetically. Terms below ``min_tf`` or on the stoplist are out.
    """
    scored = []
    for term, tf_c in cluster_tf.items():
        if tf_c < min_tf or term in stoplist:
            continue
        score = tfs_score(tf_c, total_tf[term], alpha)
        scored.append((-score, -tf_c, term))
    scored.sort()
    ranked = [term for _, _, term in scored]
    if not ranked:
        return ClusterLabel(label=f"(unlabeled) {cluster_id}")
    return ClusterLabel(
        label="; ".join(ranked[:3]),
        additional_terms=tuple(ranked[3:10]),
    )


# ---------------------------------------------------------------------------
# Corpus-level orchestration
# ---------------------------------------------------------------------------


def extract_field_phrases(
    corpus,
    config: LabelConfig | None = None,
    pretagged_path: str | Path | None = None,
) -> dict[str, dict[str, list[str]]]:
    """Per publication and field, the list of extracted phrases.

    With ``pretagged_path`` the tagger is skipped for any (pub, field) pair
    present in the pre-tagged JSONL file.
    """
    config = config or LabelConfig()
    pretagged: dict[str, dict[str, list[tuple[str, str]]]] = {}
    if pretagged_path is not None:
        with Path(pretagged_path).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                pretagged[str(obj["pub_id"])] = {
                    name: [(str(t), str(tag)) for t, tag in pairs]
                    for name, pairs in obj.get("fields", {}).items()
                }

    out: dict[str, dict[str, list[str]]] = {}
    for pub_id in sorted(corpus.publications):
        record = corpus.publications[pub_id]
        tagged_fields = pretagged.get(pub_id, {})
        per_field: dict[str, list[str]] = {}
        for name in TEXT_FIELDS:
            if name in tagged_fields:
                per_field[name] = phrases_from_tagged(
                    tagged_fields[name], max_len=config.max_phrase_len)
                continue
            value = getattr(record, name)
            texts = value if isinstance(value, (list, tuple)) else [value]
            phrases: list[str] = []
            for text in texts:
                phrases.extend(extract_noun_phrases(text, max_len=config.max_phrase_len))
            per_field[name] = phrases
        out[pub_id] = per_field
    return out


def level_term_stats(
    field_phrases: dict[str, dict[str, list[str]]],
    assignment: dict[str, str],
    fields: list[str],
) -> tuple[dict[str, dict[str, int]], dict[str, int]]:
    """Per-cluster and corpus-wide term counts over the given fields.

    Clusters partition publications, so per term the cluster counts sum to
    the corpus-wide count at any single level.
    """
    cluster_tf: dict[str, dict[str, int]] = {}
    total_tf: dict[str, int] = {}
    for pub_id, path in assignment.items():
        counts = cluster_tf.setdefault(path, {})
        for name in fields:
            for phrase in field_phrases[pub_id][name]:
                counts[phrase] = counts.get(phrase, 0) + 1
                total_tf[phrase] = total_tf.get(phrase, 0) + 1
    return cluster_tf, total_tf


def label_tree(
    corpus,
    tree: ClusterTree,
    config: LabelConfig | None = None,
    stoplist: frozenset[str] | None = None,
    pretagged_path: str | Path | None = None,
) -> dict[str, dict[str, ClusterLabel]]:
    """Labels for every cluster at every level: level -> path -> label."""
    config = config or LabelConfig()
    if stoplist is None:
        stoplist = load_stoplist()
    field_phrases = extract_field_phrases(corpus, config, pretagged_path)

    labels: dict[str, dict[str, ClusterLabel]] = {}
    for level in tree.levels:
        fields = config.fields.get(level.name)
        if fields is None:
            raise LabelError(f"no field config for level {level.name!r}")
        alpha = config.alpha.get(level.name)
        if alpha is None:
            raise LabelError(f"no alpha for level {level.name!r}")

        assignment = tree.pub_assignment(level.name)
        cluster_tf, total_tf = level_term_stats(field_phrases, assignment, fields)

        level_labels: dict[str, ClusterLabel] = {}
        for cluster in level.clusters:
            level_labels[cluster.path] = label_cluster(
                cluster.path,
                cluster_tf.get(cluster.path, {}),
                total_tf,
                alpha,
                stoplist=stoplist,
                min_tf=config.min_tf,
            )
        labels[level.name] = level_labels
    return labels


def save_labels(labels: dict[str, dict[str, ClusterLabel]], directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for level in sorted(labels):
        with (directory / f"labels_{level}.tsv").open("w", encoding="utf-8") as fh:
            for path in sorted(labels[level], key=_path_key):
                lab = labels[level][path]
                fh.write(f"{path}\t{lab.label}\t{'|'.join(lab.additional_terms)}\n")


def load_labels(directory, level_names) -> dict[str, dict[str, ClusterLabel]]:
    directory = Path(directory)
    out: dict[str, dict[str, ClusterLabel]] = {}
    for level in level_names:
        mapping: dict[str, ClusterLabel] = {}
        with (directory / f"labels_{level}.tsv").open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                path, label, extra = line.rstrip("\n").split("\t")
                terms = tuple(t for t in extra.split("|") if t)
                mapping[path] = ClusterLabel(label=label, additional_terms=terms)
        out[level] = mapping
    return out


def _path_key(path: str) -> tuple:
    return tuple(int(p) for p in path.split("."))
