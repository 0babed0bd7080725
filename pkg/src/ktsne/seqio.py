"""Labeled sequence corpora: FASTA ingest and reproducible synthetic generation.

Headers follow ``>id|label``; a missing label maps to "unlabeled". Records keep
file order, residues are uppercased, and every character must belong to the
corpus alphabet (core letters plus the ambiguity symbol).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

DEFAULT_LABEL = "unlabeled"
GAP = "-"


class FastaError(ValueError):
    """Malformed FASTA input; carries the 1-based line number when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class Alphabet:
    """Residue alphabet: core letters, ambiguity symbol, optional extras (gaps)."""

    name: str
    core: str
    ambiguous: str
    extra: str = ""

    @property
    def symbols(self) -> str:
        return self.core + self.ambiguous + self.extra

    def with_gaps(self) -> "Alphabet":
        if GAP in self.symbols:
            return self
        return replace(self, extra=self.extra + GAP)

    def __contains__(self, ch: str) -> bool:
        return ch in self.symbols


AMINO = Alphabet(name="amino", core="ACDEFGHIKLMNPQRSTVWY", ambiguous="X")
NUCLEOTIDE = Alphabet(name="nucleotide", core="ACGT", ambiguous="N")

ALPHABETS = {AMINO.name: AMINO, NUCLEOTIDE.name: NUCLEOTIDE}


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    label: str
    residues: str


@dataclass
class Corpus:
    records: list[SequenceRecord] = field(default_factory=list)
    alphabet: Alphabet = AMINO

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.records]


def read_fasta(path: str, alphabet: Alphabet) -> Corpus:
    """Parse a FASTA file into a Corpus, preserving record order.

    Raises FastaError (with line number) on a missing header, a residue
    outside the alphabet, an empty file, or a duplicate/empty id.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()

    symbols = set(alphabet.symbols)
    records: list[SequenceRecord] = []
    seen_ids: set[str] = set()
    header: tuple[str, str, int] | None = None  # id, label, header line no
    chunks: list[str] = []

    def flush() -> None:
        if header is None:
            return
        rec_id, label, line_no = header
        residues = "".join(chunks)
        if not residues:
            raise FastaError(f"record '{rec_id}' has no sequence lines", path, line_no)
        records.append(SequenceRecord(id=rec_id, label=label, residues=residues))

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            chunks = []
            body = line[1:].strip()
            if "|" in body:
                rec_id, label = body.split("|", 1)
            else:
                rec_id, label = body, DEFAULT_LABEL
            rec_id = rec_id.strip()
            label = label.strip() or DEFAULT_LABEL
            if not rec_id:
                raise FastaError("header has empty id", path, line_no)
            if rec_id in seen_ids:
                raise FastaError(f"duplicate record id '{rec_id}'", path, line_no)
            seen_ids.add(rec_id)
            header = (rec_id, label, line_no)
        else:
            if header is None:
                raise FastaError("sequence data before any '>' header", path, line_no)
            seq = line.upper()
            for ch in seq:
                if ch not in symbols:
                    hint = " (use a gap-extended alphabet)" if ch == GAP else ""
                    raise FastaError(
                        f"character '{ch}' not in {alphabet.name} alphabet{hint}",
                        path,
                        line_no,
                    )
            chunks.append(seq)
    flush()

    if not records:
        raise FastaError("empty file: no records found", path)
    return Corpus(records=records, alphabet=alphabet)


def write_fasta(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus.records:
            fh.write(f">{rec.id}|{rec.label}\n{rec.residues}\n")


def synth_corpus(
    n_classes: int,
    per_class: int,
    length: int,
    mutation_rate: float,
    seed: int,
    alphabet: Alphabet = AMINO,
) -> Corpus:
    """Generate a labeled corpus of mutated copies of per-class ancestors.

    One uniformly random ancestor sequence is drawn per class; each record
    mutates every position independently with probability ``mutation_rate``,
    replacing the residue with a uniformly random *different* core letter, so
    the Hamming distance to the ancestor is Binomial(length, rate) exactly.
    Deterministic for a fixed seed. Labels are "class0" .. "class{n-1}".
    """
    if not 0.0 <= mutation_rate <= 1.0:
        raise ValueError(f"mutation_rate must be in [0, 1], got {mutation_rate}")
    if n_classes < 1 or per_class < 1 or length < 1:
        raise ValueError("n_classes, per_class and length must all be >= 1")

    rng = np.random.default_rng(seed)
    letters = np.frombuffer(alphabet.core.encode("ascii"), dtype=np.uint8)
    n_letters = len(letters)
    # all ancestors drawn up front, so they depend only on (seed, n_classes,
    # length) and can be recovered with a mutation_rate=0 run
    ancestors = rng.integers(0, n_letters, size=(n_classes, length))
    records: list[SequenceRecord] = []
    for c in range(n_classes):
        for r in range(per_class):
            seq = ancestors[c].copy()
            hit = rng.random(length) < mutation_rate
            n_hit = int(hit.sum())
            if n_hit:
                # offset in 1..n_letters-1 guarantees a different letter
                offset = rng.integers(1, n_letters, size=n_hit)
                seq[hit] = (seq[hit] + offset) % n_letters
            residues = letters[seq].tobytes().decode("ascii")
            records.append(
                SequenceRecord(id=f"class{c}_{r}", label=f"class{c}", residues=residues)
            )
    return Corpus(records=records, alphabet=alphabet)
