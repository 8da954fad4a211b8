"""Config-driven batch run: ingest -> normalize -> network -> expertise ->
matrices -> recommend -> evaluate.

Every stage reads the files written by the one before it from the output
directory, so the stages can be run one at a time and inspected in
between. A full run executes the same stage functions in order inside a
scratch directory and only then moves the artifacts into place.
"""

from __future__ import annotations

import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from ._validation import check_delta, check_k
from .corpus import (
    CorpusConfig,
    apply_inclusion_filter,
    parse_wos_export,
    read_corpus_dir,
    write_wos_export,
)
from .embeddings import (
    TrainParams,
    dump_embeddings,
    load_embeddings,
    read_sentences,
    train_skipgram,
)
from .evaluation import evaluate_recommendations
from .exceptions import ConfigError, InstCollabError, MissingUpstream
from .expertise import rank_profile, read_profile_tsv, write_profile_tsv
from .matrices import build_ti_matrices, read_ti_dump, write_ti_dump
from .network import ThematicProfile, read_score_file, thematic_profile
from .normalize import KeywordNormalizer
from .recommender import (
    read_recommendations_csv,
    recommend_all,
    write_recommendations_csv,
)

log = logging.getLogger(__name__)

STAGES = ("ingest", "normalize", "network", "expertise", "matrices", "recommend", "evaluate")

# artifacts each stage owns, relative to output_dir
OUTPUTS = {
    "ingest": ("ingest",),
    "normalize": ("canonical_map.tsv", "normalized", "embeddings.txt"),
    "network": ("strength",),
    "expertise": ("profiles", "expertise_summary.tsv"),
    "matrices": ("ti_matrix.tsv", "institutions.txt"),
    "recommend": ("recommendations.csv",),
    "evaluate": ("evaluation_report.txt", "evaluation_report.json"),
}

_KEYS = {
    "input_dir", "output_dir", "embeddings_mode", "embeddings_path", "delta",
    "min_publications", "year_range", "top_k_similar", "selected_institutions",
    "seed", "score_file",
}


class PipelineError(InstCollabError, RuntimeError):
    pass


@dataclass
class PipelineConfig:
    """Run settings, normally read from a flat ``key = value`` file.

    ``embeddings_mode`` is ``load`` (read ``embeddings_path`` in the
    word-vector text format) or ``train`` (fit skip-gram vectors on the
    sentence file at ``embeddings_path``, or on the corpus keywords when
    no path is given).
    """

    input_dir: Path
    output_dir: Path
    embeddings_mode: str = "load"
    embeddings_path: Path | None = None
    delta: float = 0.75
    min_publications: int = 25
    year_range: tuple = (2010, 2019)
    top_k_similar: int = 5
    selected_institutions: tuple | None = None
    seed: int = 0
    score_file: Path | None = None
    train_params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.input_dir = Path(self.input_dir)
        self.output_dir = Path(self.output_dir)
        if self.embeddings_path is not None:
            self.embeddings_path = Path(self.embeddings_path)
        if self.score_file is not None:
            self.score_file = Path(self.score_file)
        if self.embeddings_mode not in ("load", "train"):
            raise ConfigError(f"embeddings_mode must be 'load' or 'train', got {self.embeddings_mode!r}")
        if self.embeddings_mode == "load" and self.embeddings_path is None:
            raise ConfigError("embeddings_mode=load needs embeddings_path")
        try:
            check_delta(self.delta)
            check_k(self.top_k_similar, "top_k_similar")
            _ = self.corpus_config  # validates min_publications and year_range
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.selected_institutions is not None:
            self.selected_institutions = tuple(self.selected_institutions)

    @property
    def corpus_config(self) -> CorpusConfig:
        return CorpusConfig(self.min_publications, tuple(self.year_range))

    @classmethod
    def from_file(cls, path) -> PipelineConfig:
        """Parse a config file; relative paths resolve against its directory."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text, base_dir=path.parent)

    @classmethod
    def from_text(cls, text: str, base_dir=".") -> PipelineConfig:
        raw = {}
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {line_no}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"config line {line_no}: unknown key {key!r}")
            if key in raw:
                raise ConfigError(f"config line {line_no}: duplicate key {key!r}")
            raw[key] = value
        for required in ("input_dir", "output_dir"):
            if required not in raw:
                raise ConfigError(f"config is missing {required!r}")

        base = Path(base_dir)
        kwargs = {}
        try:
            for key in ("input_dir", "output_dir", "embeddings_path", "score_file"):
                if raw.get(key):
                    kwargs[key] = base / raw[key]
            if "embeddings_mode" in raw:
                kwargs["embeddings_mode"] = raw["embeddings_mode"]
            if "delta" in raw:
                kwargs["delta"] = float(raw["delta"])
            for key in ("min_publications", "top_k_similar", "seed"):
                if key in raw:
                    kwargs[key] = int(raw[key])
            if "year_range" in raw:
                parts = raw["year_range"].replace("-", ",").split(",")
                start, end = (int(p) for p in parts if p.strip())
                kwargs["year_range"] = (start, end)
        except ValueError as exc:
            raise ConfigError(f"bad config value: {exc}") from None
        if raw.get("selected_institutions"):
            kwargs["selected_institutions"] = tuple(
                s.strip() for s in raw["selected_institutions"].split(",") if s.strip()
            )
        return cls(**kwargs)


# ------------------------------------------------------------------ file io

def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _read(path: Path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _require(stage, *paths):
    for p in paths:
        if not p.exists():
            raise MissingUpstream(stage, p)


def _tsv_files(stage, directory: Path) -> list:
    _require(stage, directory)
    files = sorted(directory.glob("*.tsv"))
    if not files:
        raise MissingUpstream(stage, directory)
    return files


def _read_datasets(stage, directory: Path) -> list:
    out = []
    for f in _tsv_files(stage, directory):
        out.append(parse_wos_export(_read(f), f.stem))
    return out


def _read_strengths(path: Path) -> ThematicProfile:
    strength = {}
    lines = _read(path).splitlines()
    if not lines or lines[0] != "keyword\tstrength":
        raise ValueError(f"{path}: not a strength file")
    for line in lines[1:]:
        if not line:
            continue
        kw, s = line.split("\t")
        strength[kw] = int(s) if s.isdigit() else float(s)
    return ThematicProfile(path.stem, strength)


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


def _read_summary(path: Path) -> dict:
    x = {}
    for line in _read(path).splitlines()[1:]:
        if line:
            inst, xi, _ = line.split("\t")
            x[inst] = int(xi)
    return x


# ------------------------------------------------------------------- stages

def _ingest(cfg: PipelineConfig, out: Path, src: Path):
    if not cfg.input_dir.is_dir():
        raise PipelineError(f"input_dir {cfg.input_dir} does not exist")
    datasets = read_corpus_dir(cfg.input_dir)
    if not datasets:
        raise PipelineError(f"no institution files in {cfg.input_dir}")
    kept = apply_inclusion_filter(datasets, cfg.corpus_config)
    log.info("ingest: %d of %d institutions pass the inclusion filter", len(kept), len(datasets))
    if not kept:
        raise PipelineError("no institution passes the inclusion filter")
    for ds in kept:
        _write(out / "ingest" / f"{ds.institution_id}.tsv", write_wos_export(ds))


def _embeddings(cfg: PipelineConfig, datasets):
    if cfg.embeddings_mode == "load":
        if not cfg.embeddings_path.is_file():
            raise PipelineError(f"embeddings file {cfg.embeddings_path} not found")
        return load_embeddings(_read(cfg.embeddings_path))
    if cfg.embeddings_path is not None:
        with open(cfg.embeddings_path, encoding="utf-8") as fh:
            sentences = list(read_sentences(fh))
    else:
        sentences = [
            " ".join(r.author_keywords).split()
            for ds in datasets for r in ds.records if r.author_keywords
        ]
    params = TrainParams(seed=cfg.seed, **cfg.train_params)
    log.info("normalize: training skip-gram on %d sentences", len(sentences))
    return train_skipgram(sentences, params)


def _normalize(cfg: PipelineConfig, out: Path, src: Path):
    datasets = _read_datasets("normalize", src / "ingest")
    table = _embeddings(cfg, datasets)
    if cfg.embeddings_mode == "train":
        _write(out / "embeddings.txt", dump_embeddings(table))
    normalizer = KeywordNormalizer(embeddings=table, k=cfg.top_k_similar).fit(datasets)
    cmap = normalizer.canonical_map_
    moved = sum(1 for k in cmap if cmap[k] != k)
    log.info("normalize: %d keywords, %d rewritten", len(cmap), moved)
    path = out / "canonical_map.tsv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        cmap.write_tsv(fh)
    for ds in normalizer.transform(datasets):
        _write(out / "normalized" / f"{ds.institution_id}.tsv", write_wos_export(ds))


def _network(cfg: PipelineConfig, out: Path, src: Path):
    datasets = _read_datasets("network", src / "normalized")
    scores = None
    if cfg.score_file is not None:
        scores = read_score_file(_read(cfg.score_file))
    for ds in datasets:
        prof = thematic_profile(ds, scores)
        lines = ["keyword\tstrength"]
        lines += [f"{kw}\t{_fmt(prof.strength[kw])}" for kw in sorted(prof.strength)]
        _write(out / "strength" / f"{ds.institution_id}.tsv", "\n".join(lines) + "\n")


def _expertise(cfg: PipelineConfig, out: Path, src: Path):
    summary = ["institution\tx\txg"]
    for f in _tsv_files("expertise", src / "strength"):
        rp = rank_profile(_read_strengths(f))
        _write(out / "profiles" / f.name, write_profile_tsv(rp))
        summary.append(f"{rp.institution_id}\t{rp.x}\t{rp.xg}")
        log.info("expertise: %s x=%d xg=%d", rp.institution_id, rp.x, rp.xg)
    _write(out / "expertise_summary.tsv", "\n".join(summary) + "\n")


def _matrices(cfg: PipelineConfig, out: Path, src: Path):
    files = _tsv_files("matrices", src / "profiles")
    profiles = [rank_profile(read_profile_tsv(_read(f), f.stem)) for f in files]
    M = build_ti_matrices(profiles)
    log.info("matrices: %d areas x %d institutions", *M.shape)
    _write(out / "ti_matrix.tsv", write_ti_dump(M))
    _write(out / "institutions.txt", "".join(f"{i}\n" for i in M.institutions))


def _recommend(cfg: PipelineConfig, out: Path, src: Path):
    _require("recommend", src / "ti_matrix.tsv", src / "institutions.txt")
    institutions = _read(src / "institutions.txt").split()
    M = read_ti_dump(_read(src / "ti_matrix.tsv"), institutions)
    results = {i: recommend_all(i, M, cfg.delta) for i in institutions}
    _write(out / "recommendations.csv", write_recommendations_csv(results))


def _evaluate(cfg: PipelineConfig, out: Path, src: Path):
    _require("evaluate", src / "recommendations.csv", src / "expertise_summary.tsv")
    if cfg.selected_institutions is None:
        log.info("evaluate: no selected_institutions, report skipped")
        return
    rows = read_recommendations_csv(_read(src / "recommendations.csv"))
    x_values = _read_summary(src / "expertise_summary.tsv")
    unknown = sorted(set(cfg.selected_institutions) - set(x_values))
    if unknown:
        raise ConfigError(f"selected institutions not in the corpus: {', '.join(unknown)}")
    report = evaluate_recommendations(rows, x_values, cfg.selected_institutions)
    _write(out / "evaluation_report.txt", report.to_text())
    _write(out / "evaluation_report.json", report.to_json())


_RUNNERS = {
    "ingest": _ingest,
    "normalize": _normalize,
    "network": _network,
    "expertise": _expertise,
    "matrices": _matrices,
    "recommend": _recommend,
    "evaluate": _evaluate,
}


def _remove(path: Path):
    if path.is_dir():
        shutil.rmtree(path)
    elif path.exists():
        path.unlink()


def _install(stage, scratch: Path, dest: Path):
    """Replace the stage's artifacts in *dest* with those built in *scratch*."""
    for name in OUTPUTS[stage]:
        _remove(dest / name)
        if (scratch / name).exists():
            os.replace(scratch / name, dest / name)


def run_stage(cfg: PipelineConfig, stage: str):
    """Run one stage against the artifacts already in ``cfg.output_dir``.

    The stage writes into a scratch directory first; its previous
    artifacts are replaced only once it has finished, and nothing is left
    behind when it fails.

    Raises
    ------
    MissingUpstream
        An input written by an earlier stage is absent.
    """
    if stage not in _RUNNERS:
        raise ValueError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=cfg.output_dir, prefix=f".{stage}-") as tmp:
        scratch = Path(tmp)
        log.info("stage %s", stage)
        _RUNNERS[stage](cfg, scratch, cfg.output_dir)
        _install(stage, scratch, cfg.output_dir)


def run_pipeline(cfg: PipelineConfig):
    """Run all stages; artifacts appear in ``output_dir`` only if every stage succeeds."""
    parent = cfg.output_dir.parent
    parent.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=parent, prefix=f".{cfg.output_dir.name}-") as tmp:
        scratch = Path(tmp)
        for stage in STAGES:
            log.info("stage %s", stage)
            _RUNNERS[stage](cfg, scratch, scratch)
        cfg.output_dir.mkdir(exist_ok=True)
        for stage in STAGES:
            _install(stage, scratch, cfg.output_dir)
