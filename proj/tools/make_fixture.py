#!/usr/bin/env python3
"""Generate the bundled synthetic fixture under data/fixture/.

200 documents, 5 health topics, three-aspect qrels, two criterion-score
files (base/large estimator roles) and per-topic candidate pools. Output is
fully determined by SEED; rerunning rewrites byte-identical files.

Some documents of topic 101 mention the query terms only after their 20th
sentence. BM25 ranks them highly while the sentence-truncated semantic
ranker does not, so fusing the two changes that topic's top 10.
"""

import json
import random
from pathlib import Path

SEED = 20211027
N_DOCS = 200
OUT = Path(__file__).resolve().parent.parent / "data" / "fixture"

TOPICS = [
    ("101", "vitamin c common cold",
     "Does vitamin C prevent or cure the common cold?",
     ["vitamin", "c", "common", "cold", "ascorbic", "immune", "sniffles", "citrus"]),
    ("102", "zinc supplements covid",
     "Can zinc supplements treat or prevent COVID-19?",
     ["zinc", "supplements", "covid", "coronavirus", "lozenges", "infection", "mineral"]),
    ("103", "honey cough children",
     "Is honey an effective treatment for cough in children?",
     ["honey", "cough", "children", "syrup", "throat", "kids", "nighttime"]),
    ("104", "melatonin insomnia",
     "Does melatonin help with insomnia?",
     ["melatonin", "insomnia", "sleep", "hormone", "circadian", "bedtime"]),
    ("105", "apple cider vinegar weight loss",
     "Does apple cider vinegar cause weight loss?",
     ["apple", "cider", "vinegar", "weight", "loss", "diet", "acetic"]),
]

FILLER = ("study patients doctors research clinical trial evidence health people "
          "results benefit risk dose daily effect report experts said found "
          "hospital medicine treatment review symptoms week group placebo").split()

SOURCES = ["clinic", "journal", "blog", "forum", "shop", "news", "university", "pharmacy"]


def sentence(rng, words, topical_share):
    n = rng.randint(6, 14)
    out = []
    for _ in range(n):
        if rng.random() < topical_share:
            out.append(rng.choice(words))
        else:
            out.append(rng.choice(FILLER))
    out[0] = out[0].capitalize()
    return " ".join(out) + rng.choice([".", ".", ".", "!", "?"])


def make_doc(rng, idx, topic_idx):
    words = TOPICS[topic_idx][3]
    n_sent = rng.randint(4, 28)
    share = rng.uniform(0.15, 0.6)
    sents = [sentence(rng, words, share) for _ in range(n_sent)]
    # Occasional cross-topic mention.
    if rng.random() < 0.3:
        other = TOPICS[rng.randrange(len(TOPICS))][3]
        sents.insert(rng.randrange(len(sents) + 1), sentence(rng, other, 0.4))
    return sents


def late_mention_doc(rng):
    """Off-topic opening, query terms only after sentence 20."""
    sents = [sentence(rng, FILLER, 0.0) for _ in range(21)]
    query = TOPICS[0][1].split()
    for _ in range(4):
        sents.append(" ".join(query * 3).capitalize() + ".")
    return sents


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    docs = []
    primary = []
    late = set()
    for i in range(N_DOCS):
        doc_id = f"doc{i:03d}"
        t = i % len(TOPICS)
        if t == 0 and i % 25 == 0:
            sents = late_mention_doc(rng)
            late.add(doc_id)
        else:
            sents = make_doc(rng, i, t)
        url = f"https://{rng.choice(SOURCES)}.example.org/{doc_id}"
        docs.append({"doc_id": doc_id, "url": url, "text": " ".join(sents)})
        primary.append(t)

    with open(OUT / "corpus.jsonl", "w") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=True) + "\n")

    with open(OUT / "topics.jsonl", "w") as f:
        for tid, query, desc, _ in TOPICS:
            f.write(json.dumps({"topic_id": tid, "query": query, "description": desc}) + "\n")

    # Qrels: every on-topic document plus a few off-topic ones per topic.
    with open(OUT / "qrels.txt", "w") as f:
        for t, (tid, _, _, _) in enumerate(TOPICS):
            judged = [i for i in range(N_DOCS) if primary[i] == t]
            others = [i for i in range(N_DOCS) if primary[i] != t]
            judged += rng.sample(others, 10)
            for i in sorted(judged):
                doc_id = docs[i]["doc_id"]
                on_topic = primary[i] == t and doc_id not in late
                if on_topic:
                    useful = rng.choices([0, 1, 2], weights=[2, 4, 4])[0]
                else:
                    useful = rng.choices([0, 1], weights=[8, 2])[0]
                correct = rng.choices([-1, 0, 1], weights=[1, 3, 6])[0] if useful else -1
                credible = rng.choices([-1, 0, 1], weights=[1, 4, 5])[0]
                f.write(f"{tid} 0 {doc_id} {useful} {correct} {credible}\n")

    # Criterion probabilities; the large-model role is a noisier copy of the
    # base one so the two re-rankings differ.
    with open(OUT / "qe_base.txt", "w") as fb, open(OUT / "qe_large.txt", "w") as fl:
        for d in docs:
            base = [rng.random() for _ in range(4)]
            large = [min(1.0, max(0.0, p + rng.uniform(-0.3, 0.3))) for p in base]
            fb.write(d["doc_id"] + " " + " ".join(f"{p:.4f}" for p in base) + " qe_base\n")
            fl.write(d["doc_id"] + " " + " ".join(f"{p:.4f}" for p in large) + " qe_large\n")

    # Candidate pools: on-topic documents plus 60 others.
    with open(OUT / "candidates.txt", "w") as f:
        for t, (tid, _, _, _) in enumerate(TOPICS):
            pool = [i for i in range(N_DOCS) if primary[i] == t]
            pool += rng.sample([i for i in range(N_DOCS) if primary[i] != t], 60)
            for i in sorted(pool):
                f.write(f"{tid} {docs[i]['doc_id']}\n")


if __name__ == "__main__":
    main()
