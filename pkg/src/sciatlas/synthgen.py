"""Synthetic corpora with a planted 3-level structure.

Publications are organized as research areas > disciplines > specialties >
topics. Citations are sampled so that most links stay inside a topic, fewer
inside the specialty, fewer again inside the discipline, and a trickle goes
anywhere; each topic/specialty/discipline also gets its own vocabulary so
cluster labels come out meaningful. Everything is driven by one seed.

Used for the bundled end-to-end fixture (`sciatlas make-fixture`) and as the
workhorse corpus in tests.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import CitationEdge, Corpus, PublicationRecord

_ADJECTIVES = """
malignant chronic acute pediatric clinical molecular cardiac neural renal
hepatic vascular cellular genetic viral bacterial immune metabolic cognitive
surgical dental spinal gastric ocular dermal thoracic cranial arterial
""".split()

_NOUNS = """
melanoma carcinoma lymphoma psoriasis dermatitis eczema keratinocyte nevus
arrhythmia fibrillation ischemia infarction angina valve ventricle
neuron synapse dementia epilepsy migraine cortex ganglion
nephron dialysis glomerulus creatinine cystitis ureter
insulin glucose thyroid hormone adrenal pancreas
antibody antigen cytokine lymphocyte macrophage interferon
genome mutation allele chromosome transcription methylation
tumor biopsy metastasis oncogene chemotherapy radiotherapy
vaccine pathogen influenza coronavirus sepsis abscess
cartilage tendon fracture scoliosis arthritis osteoporosis
retina cornea glaucoma cataract strabismus macula
enamel caries gingiva implant orthodontics molar
plasma platelet anemia leukemia thrombosis hemoglobin
pneumonia asthma bronchitis emphysema fibrosis pleura
ulcer gastritis colitis hepatitis cirrhosis polyp
""".split()

_CITIES = """
stockholm boston london toronto sydney berlin amsterdam copenhagen oslo
madrid vienna zurich helsinki dublin prague lisbon brussels warsaw
""".split()


@dataclass
class SynthSpec:
    n_areas: int = 4
    disciplines_per_area: int = 3
    specialties_per_discipline: int = 3
    topics_per_specialty: int = 4
    pubs_per_topic: int = 70
    cites_same_topic: int = 3
    cites_same_specialty: int = 1
    p_cite_same_discipline: float = 0.6
    p_cite_same_area: float = 0.3
    p_cite_anywhere: float = 0.1
    year_range: tuple[int, int] = (1995, 2020)

    @property
    def n_topics(self) -> int:
        return (self.n_areas * self.disciplines_per_area
                * self.specialties_per_discipline * self.topics_per_specialty)

    @property
    def n_publications(self) -> int:
        return self.n_topics * self.pubs_per_topic


@dataclass
class SynthCorpus:
    corpus: Corpus
    topic_of: dict[str, int]
    specialty_of: dict[str, int]
    discipline_of: dict[str, int]
    area_of: dict[str, int]
    subset: list[str]
    metric: dict[str, float]


def _phrase(rng: random.Random) -> str:
    if rng.random() < 0.5:
        return f"{rng.choice(_ADJECTIVES)} {rng.choice(_NOUNS)}"
    return f"{rng.choice(_NOUNS)} {rng.choice(_NOUNS)}"


def generate(spec: SynthSpec | None = None, seed: int = 0) -> SynthCorpus:
    spec = spec or SynthSpec()
    rng = random.Random(seed)

    n_disc = spec.n_areas * spec.disciplines_per_area
    n_spec = n_disc * spec.specialties_per_discipline
    n_topic = spec.n_topics

    topic_vocab = [(_phrase(rng), _phrase(rng), rng.choice(_NOUNS)) for _ in range(n_topic)]
    spec_vocab = [_phrase(rng) for _ in range(n_spec)]
    journal_of_spec = [f"journal of {spec_vocab[s]}" for s in range(n_spec)]
    disc_vocab = [rng.choice(_NOUNS) for _ in range(n_disc)]
    disc_city = [rng.choice(_CITIES) for _ in range(n_disc)]
    disc_oa_rate = [rng.uniform(0.15, 0.85) for _ in range(n_disc)]

    topic_of: dict[str, int] = {}
    specialty_of: dict[str, int] = {}
    discipline_of: dict[str, int] = {}
    area_of: dict[str, int] = {}
    pubs: dict[str, PublicationRecord] = {}
    pubs_in_topic: dict[int, list[str]] = {t: [] for t in range(n_topic)}
    pubs_in_spec: dict[int, list[str]] = {s: [] for s in range(n_spec)}
    pubs_in_disc: dict[int, list[str]] = {d: [] for d in range(n_disc)}
    pubs_in_area: dict[int, list[str]] = {a: [] for a in range(spec.n_areas)}
    all_ids: list[str] = []

    next_id = 10_000_001  # PMID-looking identifiers
    for topic in range(n_topic):
        s = topic // spec.topics_per_specialty
        d = s // spec.specialties_per_discipline
        a = d // spec.disciplines_per_area
        p1, p2, extra_noun = topic_vocab[topic]
        for _ in range(spec.pubs_per_topic):
            pid = str(next_id)
            next_id += 1
            year = rng.randint(*spec.year_range)
            main = p1 if rng.random() < 0.6 else p2
            title = f"{main} and {extra_noun} in {_phrase(rng)}"
            mesh = [p1.title(), p2.title()]
            if rng.random() < 0.4:
                mesh.append(spec_vocab[s].title())
            address = (f"department of {disc_vocab[d]}, "
                       f"{disc_city[d]} university, {disc_city[d]}")
            oa = "closed"
            if rng.random() < disc_oa_rate[d]:
                oa = rng.choice(["gold", "bronze", "green", "hybrid"])
            elif rng.random() < 0.05:
                oa = "unknown"
            pubs[pid] = PublicationRecord(
                pub_id=pid,
                year=year,
                title=title,
                journal_title=journal_of_spec[s],
                mesh_terms=tuple(mesh),
                author_addresses=(address,),
                pub_type="review" if rng.random() < 0.1 else "article",
                oa_status=oa,
            )
            topic_of[pid] = topic
            specialty_of[pid] = s
            discipline_of[pid] = d
            area_of[pid] = a
            pubs_in_topic[topic].append(pid)
            pubs_in_spec[s].append(pid)
            pubs_in_disc[d].append(pid)
            pubs_in_area[a].append(pid)
            all_ids.append(pid)

    citations: list[CitationEdge] = []
    seen: set[tuple[str, str]] = set()

    def cite(src: str, pool: list[str]) -> None:
        if len(pool) < 2:
            return
        dst = rng.choice(pool)
        while dst == src:
            dst = rng.choice(pool)
        pair = (src, dst)
        if pair not in seen:
            seen.add(pair)
            citations.append(CitationEdge(src, dst))

    for pid in all_ids:
        t, s, d, a = topic_of[pid], specialty_of[pid], discipline_of[pid], area_of[pid]
        for _ in range(spec.cites_same_topic):
            cite(pid, pubs_in_topic[t])
        for _ in range(spec.cites_same_specialty):
            cite(pid, pubs_in_spec[s])
        if rng.random() < spec.p_cite_same_discipline:
            cite(pid, pubs_in_disc[d])
        if rng.random() < spec.p_cite_same_area:
            cite(pid, pubs_in_area[a])
        if rng.random() < spec.p_cite_anywhere:
            cite(pid, all_ids)

    # Subset: one discipline's publications plus a sprinkle from everywhere.
    focal_disc = 0
    subset = list(pubs_in_disc[focal_disc])
    subset.extend(p for p in all_ids if rng.random() < 0.02)
    subset = sorted(set(subset))

    metric = {pid: round(rng.uniform(0.0, 10.0), 3) for pid in all_ids}

    corpus = Corpus(publications=pubs, citations=citations)
    return SynthCorpus(corpus=corpus, topic_of=topic_of, specialty_of=specialty_of,
                       discipline_of=discipline_of, area_of=area_of,
                       subset=subset, metric=metric)


def write_fixture(out_dir: str | Path, spec: SynthSpec | None = None, seed: int = 0) -> dict:
    """Write publications.jsonl, citations.tsv, subset.txt and metric.tsv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    synth = generate(spec, seed=seed)

    with (out / "publications.jsonl").open("w", encoding="utf-8") as fh:
        for pid in sorted(synth.corpus.publications, key=lambda p: int(p)):
            rec = synth.corpus.publications[pid]
            fh.write(json.dumps({
                "pub_id": rec.pub_id,
                "year": rec.year,
                "title": rec.title,
                "journal_title": rec.journal_title,
                "mesh_terms": list(rec.mesh_terms),
                "author_addresses": list(rec.author_addresses),
                "pub_type": rec.pub_type,
                "oa_status": rec.oa_status,
            }, sort_keys=True) + "\n")

    with (out / "citations.tsv").open("w", encoding="utf-8") as fh:
        for edge in synth.corpus.citations:
            fh.write(f"{edge.citing}\t{edge.cited}\n")

    with (out / "subset.txt").open("w", encoding="utf-8") as fh:
        for pid in synth.subset:
            fh.write(pid + "\n")

    with (out / "metric.tsv").open("w", encoding="utf-8") as fh:
        for pid in sorted(synth.metric, key=int):
            fh.write(f"{pid}\t{synth.metric[pid]}\n")

    return {
        "publications": len(synth.corpus.publications),
        "citations": len(synth.corpus.citations),
        "subset": len(synth.subset),
    }
