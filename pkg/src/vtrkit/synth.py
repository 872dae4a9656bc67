"""Seeded synthetic assessment-exercise generator.

The confidential product-level data of the original exercise is not
available, so end-to-end validation runs on generated data with a known
latent model: each product draws a latent quality u ~ Uniform(0,1); the peer
rating comes from quality thresholds anchored at the published scale shares
(top 20% excellent, next 20% good, next 20% acceptable, bottom 40% limited);
covered products attach citations and impact factor through a bivariate
normal whose correlation with the quality score is configurable.

Determinism contract: every product draws from its own substream keyed by
(seed, discipline, structure, index), so generation order never changes the
data, and the same seed always produces byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from statistics import NormalDist

from .model import Dataset, PeerRating, PipelineError, Product, ProductType, Provenance

__all__ = ["DisciplineSpec", "SynthConfig", "DEFAULT_DISCIPLINES", "generate_exercise", "load_synth_config"]

_NORMAL = NormalDist()

#: Product-type mix for generated products that are not database-covered.
_UNCOVERED_TYPES = (
    (ProductType.JOURNAL_ARTICLE, 0.40),
    (ProductType.BOOK, 0.30),
    (ProductType.CHAPTER, 0.14),
    (ProductType.PROCEEDINGS, 0.10),
    (ProductType.PATENT, 0.04),
    (ProductType.OTHER, 0.02),
)

_CITATION_LOG_MEDIAN = math.log(4.0)


@dataclass(frozen=True)
class DisciplineSpec:
    code: str
    n_structures: int
    products_min: int
    products_max: int
    coverage: float = 0.85


DEFAULT_DISCIPLINES = tuple(
    DisciplineSpec(code, n_structures=12, products_min=4, products_max=40)
    for code in ("MCS", "PHY", "CHE", "EAS", "BIO", "MED", "AVM", "CEA", "IIE", "ECS")
)


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs.

    ``rating_thresholds`` are cumulative shares from the top of the quality
    scale: with the default (0.20, 0.40, 0.60) the top 20% of latent quality
    is rated E, the next 20% G, the next 20% A and the bottom 40% L.
    ``target_rho`` is the latent normal-scale correlation between quality and
    the bibliometric draws.
    """

    seed: int = 0
    disciplines: tuple[DisciplineSpec, ...] = DEFAULT_DISCIPLINES
    target_rho: float = 0.5
    rating_thresholds: tuple[float, float, float] = (0.20, 0.40, 0.60)
    citation_dispersion: float = 1.0
    if_scale: float = 2.0
    year_min: int = 2001
    year_max: int = 2003
    internal_author_share: float = 0.7
    hyperauthor_rate: float = 0.002

    def validate(self) -> None:
        if len(self.rating_thresholds) != 3:
            raise PipelineError("invalid_config", "rating_thresholds must have exactly three levels")
        t1, t2, t3 = self.rating_thresholds
        if not 0.0 < t1 < t2 < t3 < 1.0:
            raise PipelineError("invalid_config", "rating_thresholds must be strictly increasing in (0, 1)")
        if not -1.0 < self.target_rho < 1.0:
            raise PipelineError("invalid_config", "target_rho must lie in (-1, 1)")
        if self.citation_dispersion <= 0 or self.if_scale <= 0:
            raise PipelineError("invalid_config", "citation_dispersion and if_scale must be positive")
        if self.year_min > self.year_max:
            raise PipelineError("invalid_config", "year_min must not exceed year_max")
        if not 0.0 <= self.internal_author_share <= 1.0:
            raise PipelineError("invalid_config", "internal_author_share must lie in [0, 1]")
        if not 0.0 <= self.hyperauthor_rate <= 1.0:
            raise PipelineError("invalid_config", "hyperauthor_rate must lie in [0, 1]")
        if not self.disciplines:
            raise PipelineError("invalid_config", "at least one discipline is required")
        for spec in self.disciplines:
            if not spec.code:
                raise PipelineError("invalid_config", "discipline code must be nonempty")
            if spec.n_structures < 1:
                raise PipelineError("invalid_config", f"{spec.code}: n_structures must be >= 1")
            if not 1 <= spec.products_min <= spec.products_max:
                raise PipelineError("invalid_config", f"{spec.code}: bad products range")
            if not 0.0 <= spec.coverage <= 1.0:
                raise PipelineError("invalid_config", f"{spec.code}: coverage must lie in [0, 1]")


def _substream(*key: object) -> random.Random:
    digest = hashlib.sha256("|".join(str(k) for k in key).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _uniform(rng: random.Random) -> float:
    # keep strictly inside (0, 1) so normal scores stay finite
    return min(max(rng.random(), 1e-12), 1.0 - 1e-16)


def _rand_int(rng: random.Random, lo: int, hi: int) -> int:
    return lo + min(int(rng.random() * (hi - lo + 1)), hi - lo)


def _rand_normal(rng: random.Random) -> float:
    return _NORMAL.inv_cdf(_uniform(rng))


def _rating_from_quality(u: float, thresholds: tuple[float, float, float]) -> PeerRating:
    t1, t2, t3 = thresholds
    if u >= 1.0 - t1:
        return PeerRating.EXCELLENT
    if u >= 1.0 - t2:
        return PeerRating.GOOD
    if u >= 1.0 - t3:
        return PeerRating.ACCEPTABLE
    return PeerRating.LIMITED


def _uncovered_type(rng: random.Random) -> ProductType:
    draw = rng.random()
    acc = 0.0
    for ptype, share in _UNCOVERED_TYPES:
        acc += share
        if draw < acc:
            return ptype
    return ProductType.OTHER


def _author_counts(rng: random.Random, config: SynthConfig) -> tuple[int, int]:
    if rng.random() < config.hyperauthor_rate:
        n_authors = _rand_int(rng, 100, 1500)
    else:
        n_authors = max(1, int(round(2.0 * math.exp(0.9 * abs(_rand_normal(rng))))))
    internal = 1 + sum(
        1 for _ in range(n_authors - 1) if rng.random() < config.internal_author_share
    )
    return n_authors, min(internal, n_authors)


def _generate_product(
    spec: DisciplineSpec, structure_id: str, index: int, config: SynthConfig
) -> Product:
    rng = _substream(config.seed, spec.code, structure_id, index)
    u = _uniform(rng)
    rating = _rating_from_quality(u, config.rating_thresholds)
    covered = rng.random() < spec.coverage
    year = _rand_int(rng, config.year_min, config.year_max)
    product_type = ProductType.JOURNAL_ARTICLE if covered else _uncovered_type(rng)
    n_authors, n_internal = _author_counts(rng, config)

    citations = None
    journal_if = None
    if covered:
        rho = config.target_rho
        z_quality = _NORMAL.inv_cdf(u)
        z_biblio = rho * z_quality + math.sqrt(1.0 - rho * rho) * _rand_normal(rng)
        citations = int(round(math.exp(_CITATION_LOG_MEDIAN + config.citation_dispersion * z_biblio)))
        journal_if = max(
            0.001,
            round(config.if_scale * math.exp(0.4 * z_biblio + 0.25 * _rand_normal(rng)), 3),
        )

    return Product(
        product_id=f"P-{spec.code}-{structure_id}-{index:04d}",
        structure_id=structure_id,
        discipline=spec.code,
        year=year,
        product_type=product_type,
        peer_rating=rating,
        tr_indexed=covered,
        citations=citations,
        journal_if=journal_if,
        n_authors=n_authors,
        n_internal_authors=n_internal,
    )


def generate_exercise(config: SynthConfig) -> Dataset:
    """Generate a full synthetic exercise dataset from a validated config."""
    config.validate()
    products = []
    for spec in config.disciplines:
        for s in range(1, spec.n_structures + 1):
            structure_id = f"S{s:03d}"
            count_rng = _substream(config.seed, spec.code, structure_id, "count")
            n_products = _rand_int(count_rng, spec.products_min, spec.products_max)
            for index in range(1, n_products + 1):
                products.append(_generate_product(spec, structure_id, index, config))

    config_digest = hashlib.sha256(repr(config).encode("utf-8")).hexdigest()
    provenance = Provenance(
        source_name=f"synth:seed={config.seed}",
        source_digest=config_digest,
        ingested_at="1970-01-01T00:00:00+00:00",
    )
    return Dataset.from_products(products, provenance)


def load_synth_config(text: str) -> SynthConfig:
    """Build a SynthConfig from its JSON form.

    Top-level keys mirror the SynthConfig fields; ``disciplines`` is a list
    of {code, n_structures, products_min, products_max, coverage} objects.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PipelineError("invalid_config", f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise PipelineError("invalid_config", "config must be a JSON object")

    kwargs: dict = {}
    simple = (
        "seed",
        "target_rho",
        "citation_dispersion",
        "if_scale",
        "year_min",
        "year_max",
        "internal_author_share",
        "hyperauthor_rate",
    )
    unknown = set(doc) - set(simple) - {"rating_thresholds", "disciplines"}
    if unknown:
        raise PipelineError("invalid_config", f"unknown config keys: {sorted(unknown)}")
    for key in simple:
        if key in doc:
            kwargs[key] = doc[key]
    if "rating_thresholds" in doc:
        kwargs["rating_thresholds"] = tuple(doc["rating_thresholds"])
    if "disciplines" in doc:
        specs = []
        for entry in doc["disciplines"]:
            try:
                specs.append(
                    DisciplineSpec(
                        code=entry["code"],
                        n_structures=int(entry["n_structures"]),
                        products_min=int(entry["products_min"]),
                        products_max=int(entry["products_max"]),
                        coverage=float(entry.get("coverage", 0.85)),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise PipelineError("invalid_config", f"bad discipline entry: {exc}") from None
        kwargs["disciplines"] = tuple(specs)
    try:
        config = SynthConfig(**kwargs)
    except TypeError as exc:
        raise PipelineError("invalid_config", str(exc)) from None
    config.validate()
    return config
