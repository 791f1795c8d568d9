#!/usr/bin/env python3
"""Regenerates the demo corpora and KB fixture in this directory.

The corpora are small hand-written category-theory texts tagged from a fixed
lexicon, so every lemma, tag and head below is deterministic. Run from any
directory; outputs land next to this script.
"""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent

# surface (lowercased) -> (lemma, UPOS, XPOS)
LEXICON = {
    "a": ("a", "DET", "DT"),
    "an": ("a", "DET", "DT"),
    "the": ("the", "DET", "DT"),
    "every": ("every", "DET", "DT"),
    "all": ("all", "DET", "DT"),
    "these": ("this", "DET", "DT"),
    "one": ("one", "NUM", "CD"),
    "of": ("of", "ADP", "IN"),
    "on": ("on", "ADP", "IN"),
    "in": ("in", "ADP", "IN"),
    "by": ("by", "ADP", "IN"),
    "for": ("for", "ADP", "IN"),
    "with": ("with", "ADP", "IN"),
    "over": ("over", "ADP", "IN"),
    "between": ("between", "ADP", "IN"),
    "as": ("as", "ADP", "IN"),
    "to": ("to", "ADP", "TO"),
    "and": ("and", "CCONJ", "CC"),
    "not": ("not", "PART", "RB"),
    "we": ("we", "PRON", "PRP"),
    "is": ("be", "AUX", "VBZ"),
    "are": ("be", "AUX", "VBP"),
    "were": ("be", "AUX", "VBD"),
    "be": ("be", "AUX", "VB"),
    "can": ("can", "AUX", "MD"),
    "has": ("have", "VERB", "VBZ"),
    "consists": ("consist", "VERB", "VBZ"),
    "construct": ("construct", "VERB", "VBP"),
    "commute": ("commute", "VERB", "VBP"),
    "form": ("form", "VERB", "VBP"),
    "gives": ("give", "VERB", "VBZ"),
    "preserve": ("preserve", "VERB", "VBP"),
    "regarded": ("regard", "VERB", "VBN"),
    "introduced": ("introduce", "VERB", "VBN"),
    "sifted": ("sift", "VERB", "VBN"),
    "filtered": ("filter", "VERB", "VBN"),
    "rise": ("rise", "NOUN", "NN"),
    "double": ("double", "ADJ", "JJ"),
    "free": ("free", "ADJ", "JJ"),
    "horizontal": ("horizontal", "ADJ", "JJ"),
    "vertical": ("vertical", "ADJ", "JJ"),
    "underlying": ("underlying", "ADJ", "JJ"),
    "reflexive": ("reflexive", "ADJ", "JJ"),
    "finite": ("finite", "ADJ", "JJ"),
    "strict": ("strict", "ADJ", "JJ"),
    "general": ("general", "ADJ", "JJ"),
    "internal": ("internal", "ADJ", "JJ"),
    "universal": ("universal", "ADJ", "JJ"),
    "small": ("small", "ADJ", "JJ"),
    "left": ("left", "ADJ", "JJ"),
    "category": ("category", "NOUN", "NN"),
    "categories": ("category", "NOUN", "NNS"),
    "object": ("object", "NOUN", "NN"),
    "objects": ("object", "NOUN", "NNS"),
    "morphisms": ("morphism", "NOUN", "NNS"),
    "squares": ("square", "NOUN", "NNS"),
    "graph": ("graph", "NOUN", "NN"),
    "coequalizers": ("coequalizer", "NOUN", "NNS"),
    "colimit": ("colimit", "NOUN", "NN"),
    "colimits": ("colimit", "NOUN", "NNS"),
    "products": ("product", "NOUN", "NNS"),
    "sets": ("set", "NOUN", "NNS"),
    "algebras": ("algebra", "NOUN", "NNS"),
    "monad": ("monad", "NOUN", "NN"),
    "monads": ("monad", "NOUN", "NNS"),
    "spans": ("span", "NOUN", "NNS"),
    "pullbacks": ("pullback", "NOUN", "NNS"),
    "cocone": ("cocone", "NOUN", "NN"),
    "diagram": ("diagram", "NOUN", "NN"),
    "collection": ("collection", "NOUN", "NN"),
    "maps": ("map", "NOUN", "NNS"),
    "group": ("group", "NOUN", "NN"),
    "functors": ("functor", "NOUN", "NNS"),
    "adjunction": ("adjunction", "NOUN", "NN"),
    "adjoints": ("adjoint", "NOUN", "NNS"),
    "notation": ("notation", "NOUN", "NN"),
    "symbols": ("symbol", "NOUN", "NNS"),
    "page": ("page", "NOUN", "NN"),
    "ehresmann": ("Ehresmann", "PROPN", "NNP"),
    ",": (",", "PUNCT", ","),
    ".": (".", "PUNCT", "."),
}

# Clause heads: the first of these in a sentence becomes the root.
ROOT_UPOS = ("VERB",)

DEPREL_BY_UPOS = {
    "DET": "det",
    "NUM": "nummod",
    "ADP": "case",
    "CCONJ": "cc",
    "PART": "advmod",
    "PRON": "nsubj",
    "AUX": "aux",
    "ADJ": "amod",
    "VERB": "advcl",
    "NOUN": "obl",
    "PROPN": "obl",
    "PUNCT": "punct",
}


def annotate(sentence):
    words = sentence.split()
    rows = []
    for w in words:
        lemma, upos, xpos = LEXICON[w.lower()]
        rows.append([w, lemma, upos, xpos])
    # A participle directly before a noun modifies it ("sifted colimits").
    attributive = {i for i, r in enumerate(rows[:-1]) if r[3] == "VBN" and rows[i + 1][2] == "NOUN"}
    root = next((i for i, r in enumerate(rows) if r[2] in ROOT_UPOS and i not in attributive), None)
    if root is None:
        # Copular sentences: the last noun before the final punctuation.
        root = max(i for i, r in enumerate(rows) if r[2] in ("NOUN", "PROPN"))
    out = []
    for i, (surface, lemma, upos, xpos) in enumerate(rows):
        if i == root:
            head, deprel = 0, "root"
        else:
            head, deprel = root + 1, DEPREL_BY_UPOS[upos]
            if i in attributive:
                deprel = "amod"
            if upos == "AUX" and rows[root][2] != "VERB":
                deprel = "cop"
            if upos in ("NOUN", "PROPN") and i < root and not any(
                rows[j][2] in ("NOUN", "PROPN") for j in range(i)
            ):
                deprel = "nsubj"
        out.append((i + 1, surface, lemma, upos, xpos, head, deprel))
    return out


def write_conllu(path, corpus_id, documents):
    lines = []
    for doc in documents:
        lines.append(f"# newdoc id = {doc['id']}")
        for key in ("title", "source_url", "authors", "date", "keywords"):
            if doc.get(key):
                lines.append(f"# {key} = {doc[key]}")
        for n, sentence in enumerate(doc["sentences"]):
            lines.append(f"# sent_id = {doc['id']}-{n}")
            lines.append(f"# text = {sentence}")
            for idx, surface, lemma, upos, xpos, head, deprel in annotate(sentence):
                lines.append("\t".join([str(idx), surface, lemma, upos, xpos, "_", str(head), deprel, "_", "_"]))
            lines.append("")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


TAC = [
    {
        "id": "tac-0001",
        "title": "Free double categories",
        "source_url": "http://www.tac.mta.ca/tac/volumes/demo/0001.pdf",
        "authors": "A. Author, B. Author",
        "date": "2019-04-01",
        "keywords": "double category, free double category",
        "sentences": [
            "A double category consists of objects , horizontal morphisms , vertical morphisms and squares .",
            "Every double category has an underlying category of objects and horizontal morphisms .",
            "We construct the free double category on a double graph .",
        ],
    },
    {
        "id": "tac-0002",
        "title": "Sifted colimits and monads",
        "source_url": "http://www.tac.mta.ca/tac/volumes/demo/0002.pdf",
        "authors": "C. Author",
        "date": "2020-11-15",
        "keywords": "sifted colimit, reflexive coequalizer, monad",
        "sentences": [
            "Reflexive coequalizers are sifted colimits .",
            "Filtered colimits and reflexive coequalizers commute with finite products in sets .",
            "The category of algebras for a monad has all sifted colimits .",
        ],
    },
    {
        "id": "tac-0003",
        "title": "Double categories of spans",
        "source_url": "http://www.tac.mta.ca/tac/volumes/demo/0003.pdf",
        "authors": "D. Author",
        "date": "2021-06-30",
        "keywords": "span, pullback, double category",
        "sentences": [
            "Spans in a category with pullbacks form a double category .",
            "These double categories are not strict in general .",
            "Small categories and functors form a category .",
        ],
    },
]

NLAB = [
    {
        "id": "nlab-0001",
        "title": "double category",
        "source_url": "https://ncatlab.org/nlab/show/double+category",
        "sentences": [
            "A double category is an internal category in the category of categories .",
            "Double categories were introduced by Ehresmann .",
        ],
    },
    {
        "id": "nlab-0002",
        "title": "colimit",
        "source_url": "https://ncatlab.org/nlab/show/colimit",
        "sentences": [
            "A colimit is a universal cocone over a diagram .",
            "Sifted colimits commute with finite products in sets .",
        ],
    },
    {
        # Meta-article: dropped by the default ingest filter rules.
        "id": "nlab-0003",
        "title": "list of notation",
        "source_url": "https://ncatlab.org/nlab/show/list+of+notation",
        "sentences": ["A page of symbols for a double category ."],
    },
]

BCT = [
    {
        "id": "bct-0001",
        "title": "Categories, functors and natural transformations",
        "authors": "T. Leinster",
        "sentences": [
            "A category consists of a collection of objects and a collection of maps .",
            "Every group can be regarded as a category with one object .",
            "Functors are maps between categories .",
        ],
    },
    {
        "id": "bct-0002",
        "title": "Adjoints",
        "authors": "T. Leinster",
        "sentences": [
            "Every adjunction gives rise to a monad .",
            "Left adjoints preserve colimits .",
        ],
    },
]

# Knowledge-base snapshot. Ids outside Q99613675 are synthetic and only
# meaningful inside this fixture.
MATH = "Q24034552"  # mathematical concept
KB = [
    ("Q99613675", "double category", [], "category internal to the category of categories", [MATH]),
    ("Q9000001", "category", ["category (mathematics)"], "algebraic structure of objects and morphisms", [MATH]),
    ("Q9000002", "functor", [], "map between categories", [MATH]),
    ("Q9000003", "natural transformation", [], "map between functors", [MATH]),
    ("Q9000004", "monad", ["triple"], "monoid in a category of endofunctors", [MATH]),
    ("Q9000005", "adjoint functors", ["adjunction"], "pair of functors in a hom-set bijection", [MATH]),
    ("Q9000006", "colimit", ["inductive limit"], "universal cocone", [MATH]),
    ("Q9000007", "limit", ["projective limit"], "universal cone", [MATH]),
    ("Q9000008", "coequalizer", [], "colimit of a parallel pair", [MATH]),
    ("Q9000009", "reflexive coequalizer", [], "coequalizer of a reflexive pair", [MATH]),
    ("Q9000010", "sifted colimit", [], "colimit over a sifted category", [MATH]),
    ("Q9000011", "filtered colimit", ["directed colimit"], "colimit over a filtered category", [MATH]),
    ("Q9000012", "span", ["correspondence"], "pair of morphisms with common domain", [MATH]),
    ("Q9000013", "pullback", ["fibered product"], "limit of a cospan", [MATH]),
    ("Q9000014", "cocone", [], "natural transformation to a constant functor", [MATH]),
    ("Q9000015", "commutative diagram", ["diagram"], "diagram whose paths compose equally", [MATH]),
    ("Q9000016", "morphism", ["arrow"], "structure-preserving map", [MATH]),
    ("Q9000017", "internal category", [], "category object in an ambient category", [MATH]),
    ("Q9000018", "free category", [], "category generated by a graph", [MATH]),
    ("Q9000019", "group", [], "set with an associative invertible operation", [MATH]),
    ("Q9000020", "small category", [], "category whose objects form a set", [MATH]),
    ("Q9000021", "2-category", ["strict 2-category"], "category enriched in categories", [MATH]),
    ("Q9000022", "bicategory", ["weak 2-category"], "weakened 2-category", [MATH]),
    ("Q9000023", "pseudo double category", ["weak double category"], "double category with weak composition", [MATH]),
    ("Q9000024", "double groupoid", ["double category of groupoids"], "double category with invertible cells", [MATH]),
    ("Q9000025", "strict double category", [], "double category with strict composition", [MATH]),
    # A label match and an alias match that both lose to Q99613675.
    ("Q9000030", "edge-symmetric double groupoid", ["Double Category"], "synthetic alias decoy", [MATH]),
    # Entries in excluded classes. Direct classes are synthetic; the class
    # graph puts each one at depth 1 or 2 below an excluded class.
    ("Q9000101", "Double Category", [], "album", ["Q9200001"]),
    ("Q9000102", "Category:Category theory", ["category"], "Wikimedia category page", ["Q4167836"]),
    ("Q9000103", "Functor", [], "kitchen appliance brand", ["Q9200002"]),
    ("Q9000104", "Colimit", [], "sculpture", ["Q9200003"]),
    ("Q9000105", "Town square", ["square"], "public open space", ["Q9200004"]),
    ("Q9000106", "Object", [], "standing stone", ["Q9200005"]),
    ("Q9000107", "Limit", [], "card game", ["Q9200006"]),
    ("Q9000108", "Adjunction", [], "ritual gesture", ["Q3769299"]),
    ("Q9000109", "Cocone Day", ["cocone"], "festival date", ["Q9200007"]),
    ("Q9000110", "Monad", [], "coin", ["Q9200008"]),
    ("Q9000111", "Reflexive period", [], "span of years", ["Q186081"]),
    ("Q9000112", "Squares", ["square"], "painting series", ["Q9200009"]),
]

CLASS_GRAPH = [
    ("Q9200001", ["Q2198855"]),  # album -> artistic concept
    ("Q9200002", ["Q223557"]),  # brand product -> physical object
    ("Q9200003", ["Q2198855"]),  # sculpture -> artistic concept
    ("Q9200004", ["Q17334923"]),  # square (place) -> physical location
    ("Q9200005", ["Q4406616"]),  # standing stone -> concrete object
    ("Q9200006", ["Q1914636"]),  # game -> activity
    ("Q9200007", ["Q186408"]),  # festival date -> point in time
    ("Q9200008", ["Q8142"]),  # coin -> currency
    ("Q9200009", ["Q9200012"]),  # painting series -> series of artworks
    ("Q9200012", ["Q9200013"]),  # series -> creative work (depth 3: not excluded)
    ("Q9200013", ["Q2198855"]),
    (MATH, ["Q9200020"]),  # mathematical concept -> abstract object
]

EXCLUSIONS = [
    ("Q223557", "physical object"),
    ("Q4406616", "concrete object"),
    ("Q17334923", "physical location"),
    ("Q4167836", "Wikimedia category"),
    ("Q1914636", "activity"),
    ("Q3769299", "human behavior"),
    ("Q2198855", "artistic concept"),
    ("Q186408", "point in time"),
    ("Q186081", "time interval"),
    ("Q8142", "currency"),
]


def main():
    raw = HERE / "raw"
    raw.mkdir(exist_ok=True)
    write_conllu(raw / "tac.conllu", "tac", TAC)
    write_conllu(raw / "nlab.conllu", "nlab", NLAB)
    write_conllu(raw / "bct.conllu", "bct", BCT)

    with open(HERE / "kb.jsonl", "w", encoding="utf-8") as f:
        for kb_id, label, aliases, description, classes in KB:
            record = {"kb_id": kb_id, "label": label, "aliases": aliases, "description": description,
                      "classes": classes}
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(HERE / "class_graph.tsv", "w", encoding="utf-8") as f:
        for child, parents in CLASS_GRAPH:
            f.write(f"{child}\t{','.join(parents)}\n")
    with open(HERE / "exclusions.tsv", "w", encoding="utf-8") as f:
        for kb_id, name in EXCLUSIONS:
            f.write(f"{kb_id}\t{name}\n")


if __name__ == "__main__":
    main()
