"""Synthetic street-register corpus with controllable defects.

Stands in for the kind of messy address column this tool targets: a base
lexicon of street names is perturbed with case noise, spacing damage,
single-character typos and numeric suffix clutter, plus an exact fraction
of repeated-character junk rows. A ground-truth file is written alongside
the data so cleaning quality can be scored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from simcleaner.tableio import write_delimited

_NAMES = [
    "Almirante Tamandaré", "Antônio Carlos", "Aristides Lobo", "Augusto Montenegro",
    "Barão do Triunfo", "Benjamin Constant", "Boaventura da Silva", "Bom Jardim",
    "Castelo Branco", "Cipriano Santos", "Conselheiro Furtado", "Curuçá",
    "Diogo Móia", "Domingos Marreiros", "Dom Pedro Primeiro", "Duque de Caxias",
    "Engenheiro Fernando Guilhon", "Estrela do Norte", "Euclides da Cunha",
    "Fernando Ferrari", "Floriano Peixoto", "Frei Gil de Vila Nova",
    "Gaspar Viana", "Generalíssimo Deodoro", "Gentil Bittencourt", "Governador José Malcher",
    "Haroldo Veloso", "Higino Amanajás", "Humaitá",
    "Inácio Moura", "Independência", "Itororó",
    "Jerônimo Pimentel", "João Balbi", "José Bonifácio", "Júlio César",
    "Kennedy Martins", "Lauro Sodré", "Leandro Ribeiro", "Lomas Valentinas",
    "Magalhães Barata", "Manoel Barata", "Mauriti", "Municipalidade",
    "Nazaré de Mocajuba", "Nina Ribeiro", "Nossa Senhora das Graças",
    "Oliveira Belo", "Osvaldo Cruz", "Ó de Almeida",
    "Padre Eutíquio", "Paes de Carvalho", "Pedro Miranda", "Presidente Pernambuco",
    "Quintino Bocaiúva", "Quinze de Agosto",
    "Rio Branco", "Romualdo de Seixas", "Rui Barbosa",
    "Santa Izabel", "Senador Lemos", "Serzedelo Correa", "Silva Castro",
    "Tavares Bastos", "Timbó", "Tiradentes", "Tupinambás",
    "Umarizal", "Universidade", "Urbano Santos",
    "Vileta", "Visconde de Souza Franco", "Vinte e Dois de Junho",
    "Wandenkolk", "Xavier de Brito", "Zacarias de Assunção",
]

_KINDS = ["Avenida", "Rua", "Travessa", "Alameda", "Passagem", "Rodovia", "Estrada"]

#: Canonical surface forms: each name paired with exactly one street kind,
#: so no two canonicals are near-duplicates of each other.
LEXICON = tuple(
    f"{name}, {_KINDS[i % len(_KINDS)]}" for i, name in enumerate(_NAMES)
)

_TYPO_ALPHABET = "abcdefghijlmnoprstuvz"
_JUNK_CHARS = "#X0@*-"


@dataclass(frozen=True)
class DefectProfile:
    """Per-row probabilities for each perturbation, plus the exact fraction
    of rows replaced by repeated-character junk."""

    case_noise: float = 0.30
    space_noise: float = 0.20
    typo_noise: float = 0.20
    suffix_noise: float = 0.03
    outlier_fraction: float = 0.02


CLEAN_PROFILE = DefectProfile(0.0, 0.0, 0.0, 0.0, 0.0)
DEFAULT_PROFILE = DefectProfile()


class CorpusPaths(NamedTuple):
    data: Path
    truth: Path


def _apply_case_noise(value: str, rng: random.Random) -> str:
    kind = rng.randrange(4)
    if kind == 0:
        return value.upper()
    if kind == 1:
        return value.lower()
    if kind == 2:
        words = value.split(" ")
        i = rng.randrange(len(words))
        words[i] = words[i].upper()
        return " ".join(words)
    i = rng.randrange(len(value))
    return value[:i] + value[i].swapcase() + value[i + 1 :]


def _apply_space_noise(value: str, rng: random.Random) -> str:
    spaces = [i for i, c in enumerate(value) if c == " "]
    if not spaces:
        return value
    i = rng.choice(spaces)
    if rng.random() < 0.7:
        return value[:i] + value[i + 1 :]
    return value[:i] + "  " + value[i + 1 :]


def _apply_typo(value: str, rng: random.Random) -> str:
    i = rng.randrange(len(value))
    op = rng.randrange(3)
    if op == 0:
        return value[:i] + rng.choice(_TYPO_ALPHABET) + value[i + 1 :]
    if op == 1:
        return value[:i] + rng.choice(_TYPO_ALPHABET) + value[i:]
    return value[:i] + value[i + 1 :]


def _range_number(rng: random.Random) -> str:
    # keep generated numbers free of 4-digit runs so suffixed rows are
    # never mistaken for repeated-character junk
    while True:
        n = str(rng.randrange(100, 9999))
        if not any(n.count(d * 3) for d in "0123456789"):
            return n


def _apply_suffix_noise(value: str, rng: random.Random) -> str:
    a, b = _range_number(rng), _range_number(rng)
    return f"{value} - de {a}/{b} a {_range_number(rng)}/{_range_number(rng)}"


def _junk_value(rng: random.Random) -> str:
    char = rng.choice(_JUNK_CHARS)
    run = char * rng.randrange(5, 10)
    return run + "." if rng.random() < 0.5 else run


def perturb(value: str, rng: random.Random, profile: DefectProfile) -> str:
    if rng.random() < profile.case_noise:
        value = _apply_case_noise(value, rng)
    if rng.random() < profile.space_noise:
        value = _apply_space_noise(value, rng)
    if rng.random() < profile.typo_noise:
        value = _apply_typo(value, rng)
    if rng.random() < profile.suffix_noise:
        value = _apply_suffix_noise(value, rng)
    return value


def generate_corpus(
    n: int,
    seed: int,
    profile: DefectProfile = DEFAULT_PROFILE,
    out_dir: str | Path = ".",
    stem: str | None = None,
) -> CorpusPaths:
    """Write a deterministic corpus of ``n`` rows plus its ground truth.

    The data file has columns (id, street); the truth file adds the
    canonical form and an outlier marker per row. Outlier row count is
    exact: ``round(n * outlier_fraction)``.
    """
    if n < 1:
        raise ValueError(f"instance count must be >= 1, got {n}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or f"corpus_{n}_{seed}"

    rng = random.Random(seed)
    outlier_count = round(n * profile.outlier_fraction)
    outlier_rows = set(rng.sample(range(n), outlier_count))

    data_rows = []
    truth_rows = []
    for i in range(n):
        if i in outlier_rows:
            value = _junk_value(rng)
            canonical = ""
            is_outlier = "1"
        else:
            canonical = LEXICON[rng.randrange(len(LEXICON))]
            value = perturb(canonical, rng, profile)
            is_outlier = "0"
        data_rows.append([str(i), value])
        truth_rows.append([str(i), value, canonical, is_outlier])

    data_path = out_dir / f"{stem}.csv"
    truth_path = out_dir / f"{stem}.truth.csv"
    write_delimited(data_rows, ["id", "street"], data_path)
    write_delimited(truth_rows, ["id", "street", "canonical", "is_outlier"], truth_path)
    return CorpusPaths(data=data_path, truth=truth_path)
