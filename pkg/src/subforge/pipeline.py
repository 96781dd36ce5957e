"""End-to-end pipeline: parse, enumerate, estimate delta, build the
language machinery and the subdivision graph, then verify everything.

The pipeline keeps going after verification failures so the report carries
every verdict; operational problems (bad config, resource caps) abort.
Exit status contract: 0 all checks passed, 2 some verification check
failed, 1 operational error.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, replace

from . import ball as ball_mod
from . import hyperbolicity as hyp
from .ball import BallCapExceeded, CayleyBall, enumerate_ball
from .language import (
    ConeTypeTable,
    WordAcceptor,
    build_acceptor,
    build_gamma,
    check_prefix_closure,
    cone_type_classes,
    verify_cone_lemma,
)
from .presentation import (
    ORACLE_DEHN,
    ORACLE_FREE,
    Presentation,
    parse_presentation,
    preset,
    verify_small_cancellation,
)
from .qi import estimate_qi_constants, verify_qi_bounds
from .subdivision import (
    assign_labels,
    build_subdivision_graph,
    check_lemma_bound,
    verify_axioms,
    working_constant,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    preset: str | None = None
    file: str | None = None
    radius: int = 4
    delta_override: float | None = None
    delta_radius: int | None = None
    delta_mode: str = hyp.MODE_EXHAUSTIVE
    delta_samples: int = 2000
    horizon: int | None = None
    element_cap: int = ball_mod.DEFAULT_ELEMENT_CAP
    geodesic_cap: int = hyp.DEFAULT_GEODESIC_CAP
    probe: int = 2
    qi_samples: int = 2000
    seed: int = 2024
    oracle: str = "auto"
    out_dir: str | None = None
    exports: tuple[str, ...] = ()
    cache_dir: str | None = None
    prefilter: bool = True
    force_k: int | None = None
    corrupt_vertex_label: bool = False

    def validate(self) -> None:
        if (self.preset is None) == (self.file is None):
            raise ConfigError("exactly one of preset/file must be given")
        if self.radius < 1:
            raise ConfigError("radius must be >= 1")
        if self.element_cap <= 0 or self.geodesic_cap <= 0:
            raise ConfigError("caps must be positive")
        if self.delta_radius is not None and 2 * self.delta_radius > self.radius:
            raise ConfigError("delta radius must satisfy 2*r <= radius")
        if self.horizon is not None and not 1 <= self.horizon <= self.radius:
            raise ConfigError("horizon must lie in [1, radius]")
        if self.delta_override is not None and self.delta_override < 0:
            raise ConfigError("delta override must be >= 0")
        if self.force_k is not None and not 0 <= self.force_k <= self.radius:
            raise ConfigError("force-k must lie in [0, radius]")
        if self.oracle not in ("auto", ORACLE_FREE, ORACLE_DEHN):
            raise ConfigError(f"unknown oracle {self.oracle!r}")


@dataclass
class Artifacts:
    presentation: Presentation | None = None
    ball: CayleyBall | None = None
    tree: object | None = None
    delta: hyp.DeltaEstimate | None = None
    table: ConeTypeTable | None = None
    acceptor: WordAcceptor | None = None
    acceptor_report: object | None = None
    graph: object | None = None
    axiom_report: object | None = None
    lemma_report: object | None = None
    qi_report: object | None = None


@dataclass
class PipelineResult:
    report: dict
    artifacts: Artifacts
    exit_code: int


def load_presentation(config: RunConfig) -> Presentation:
    if config.preset is not None:
        pres = preset(config.preset)
    else:
        with open(config.file, encoding="utf-8") as fh:
            pres = parse_presentation(fh.read(), name=os.path.basename(config.file))
    if config.oracle == "auto" or config.oracle == pres.oracle_kind:
        return pres
    if config.oracle == ORACLE_FREE:
        if pres.relators:
            raise ConfigError("oracle 'free' is unsound for a presentation with relators")
        return replace(pres, oracle_kind=ORACLE_FREE)
    return replace(pres, oracle_kind=ORACLE_DEHN)


def _ball_with_cache(pres: Presentation, config: RunConfig) -> CayleyBall:
    if not config.cache_dir:
        return enumerate_ball(pres, config.radius, cap=config.element_cap)
    os.makedirs(config.cache_dir, exist_ok=True)
    path = os.path.join(config.cache_dir, ball_mod.cache_key(pres, config.radius) + ".ball")
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return CayleyBall.from_bytes(fh.read(), pres)
    ball = enumerate_ball(pres, config.radius, cap=config.element_cap)
    with open(path, "wb") as fh:
        fh.write(ball.to_bytes())
    return ball


def _describe(ball: CayleyBall, e: int) -> dict:
    return {"id": e, "word": ball.presentation.alphabet.format_word(ball.normal_forms[e])}


def _maybe_describe(ball, item):
    if item is None:
        return None
    return [_describe(ball, e) if isinstance(e, int) and 0 <= e < ball.size else e for e in item]


def run_pipeline(config: RunConfig) -> PipelineResult:
    config.validate()
    t0 = time.perf_counter()
    timings: dict[str, float] = {}
    checks: dict[str, bool] = {}
    report: dict = {
        "tool": "subforge",
        "status": "completed",
        "config": {
            "preset": config.preset,
            "file": config.file,
            "radius": config.radius,
            "delta_override": config.delta_override,
            "delta_radius": config.delta_radius,
            "delta_mode": config.delta_mode,
            "horizon": config.horizon,
            "element_cap": config.element_cap,
            "geodesic_cap": config.geodesic_cap,
            "probe": config.probe,
            "qi_samples": config.qi_samples,
            "seed": config.seed,
            "oracle": config.oracle,
            "prefilter": config.prefilter,
            "force_k": config.force_k,
            "corrupt_vertex_label": config.corrupt_vertex_label,
            "threads": os.environ.get(hyp.THREADS_ENV, "1"),
        },
    }
    artifacts = Artifacts()

    last = [t0]

    def stage(name):
        now = time.perf_counter()
        timings[name] = now - last[0]
        last[0] = now

    # parse + small cancellation certificate
    pres = load_presentation(config)
    artifacts.presentation = pres
    report["presentation"] = {
        "name": pres.name,
        "generators": list(pres.alphabet.symbols),
        "relators": [pres.alphabet.format_word(r) for r in pres.relators],
        "oracle": pres.oracle_kind,
    }
    pieces = verify_small_cancellation(pres)
    report["small_cancellation"] = {
        "max_piece_len": pieces.max_piece_len,
        "min_relator_len": pieces.min_relator_len,
        "satisfies_c16": pieces.satisfies_c16,
        "vacuous": pieces.vacuous,
    }
    checks["small_cancellation"] = pieces.satisfies_c16
    stage("parse")

    # ball enumeration
    try:
        ball = _ball_with_cache(pres, config)
    except BallCapExceeded as exc:
        report["status"] = "aborted"
        report["error"] = str(exc)
        report["ball"] = {"radius": config.radius, "partial_sphere_sizes": exc.sphere_sizes}
        report["timings"] = timings
        return PipelineResult(report, artifacts, EXIT_ERROR)
    artifacts.ball = ball
    report["ball"] = {"radius": ball.radius, "size": ball.size, "sphere_sizes": ball.sphere_sizes}
    checks["prefix_closure"] = check_prefix_closure(ball)
    report["prefix_closure"] = {"passed": checks["prefix_closure"], "domain": ball.size}
    stage("ball")

    # delta
    delta_radius = config.delta_radius if config.delta_radius is not None else ball.radius // 2
    if config.delta_override is not None:
        delta = config.delta_override
        estimate = None
        report["delta"] = {"value": delta, "source": "override", "is_lower_bound": True}
    else:
        estimate = hyp.compute_delta(
            ball,
            delta_radius,
            mode=config.delta_mode,
            geo_cap=config.geodesic_cap,
            samples=config.delta_samples,
            seed=config.seed,
        )
        artifacts.delta = estimate
        delta = estimate.delta
        report["delta"] = {
            "value": delta,
            "source": "computed",
            "radius_checked": estimate.radius_checked,
            "mode": estimate.mode,
            "is_lower_bound": True,
            "exact_distances": estimate.exact_distances,
            "warnings": list(estimate.warnings),
            "witness": None
            if estimate.witness is None
            else {
                "x": _describe(ball, estimate.witness.x),
                "y": _describe(ball, estimate.witness.y),
                "side": estimate.witness.side,
                "point": _describe(ball, estimate.witness.point),
                "value": estimate.witness.value,
            },
        }
    stage("delta")

    # geodesic tree
    tree = build_gamma(ball)
    artifacts.tree = tree
    checks["gamma_tree"] = True  # build_gamma raises on violation
    report["gamma"] = {"vertices": tree.size, "edges": tree.edge_count}
    stage("gamma")

    # cone types with the adaptive-K escape hatch
    adaptation = []
    if config.force_k is not None:
        k = config.force_k
        k_clamped = False
    else:
        k = min(working_constant(delta), ball.radius)
        k_clamped = k != working_constant(delta)
    table = cone_type_classes(ball, k)
    acceptor, acc_report = build_acceptor(ball, table)
    adaptation.append({"k": k, "consistent": acc_report.consistent})
    if config.force_k is None:
        while not acc_report.consistent and k < ball.radius // 2:
            k += 1
            table = cone_type_classes(ball, k)
            acceptor, acc_report = build_acceptor(ball, table)
            adaptation.append({"k": k, "consistent": acc_report.consistent})
    artifacts.table = table
    artifacts.acceptor = acceptor
    artifacts.acceptor_report = acc_report
    lemma = verify_cone_lemma(ball, k, config.probe, table)
    report["cone_types"] = {
        "k": k,
        "k_clamped_to_radius": k_clamped,
        "count": table.class_count,
        "trusted_depth": table.trusted_depth,
        "adaptation": adaptation,
    }
    report["cone_lemma"] = {
        "passed": lemma.passed,
        "k": lemma.k,
        "probe": lemma.probe,
        "tested_depth": lemma.tested_depth,
        "elements_tested": lemma.elements_tested,
        "pairs_checked": lemma.pairs_checked,
        "counterexample": _maybe_describe(ball, lemma.counterexample),
    }
    checks["cone_lemma"] = lemma.passed
    report["acceptor"] = {
        "consistent": acc_report.consistent,
        "states": acc_report.state_count,
        "transitions": acc_report.transition_count,
        "initial": acceptor.initial,
        "conflicts": [list(map(str, c)) for c in acc_report.conflicts],
    }
    checks["acceptor_consistent"] = acc_report.consistent
    stage("language")

    # subdivision graph
    horizon = config.horizon if config.horizon is not None else ball.radius
    graph = build_subdivision_graph(
        ball, tree, delta, horizon=horizon,
        k_override=k, prefilter=config.prefilter,
    )
    assign_labels(graph, table)
    if config.corrupt_vertex_label:
        _corrupt_one_label(graph)
    artifacts.graph = graph
    report["xi"] = {
        "k": graph.k,
        "n_max": graph.n_max,
        "horizon": graph.horizon,
        "conventions": [
            "geodesic closeness is witnessed on outward geodesics from the "
            "origin through each endpoint (|v| = |u| + d(u, v)), meeting at "
            "distance <= 1; witnesses are searched exhaustively within the "
            "horizon, so the relation under-approximates the unbounded one "
            "(see unstable_levels)",
            "equal levels are required for closeness, as defined",
        ],
        "level_edge_counts": {str(n): len(es) for n, es in graph.level_edges.items()},
        "total_horizontal": graph.edge_count(),
        "unstable_levels": list(graph.unstable_levels),
        "label_warnings": list(graph.label_warnings),
        "vertical_edges": ball.size - 1,
    }
    lemma_bound = check_lemma_bound(graph)
    artifacts.lemma_report = lemma_bound
    report["lemma_bound"] = {
        "passed": lemma_bound.passed,
        "bound": lemma_bound.bound,
        "max_observed": lemma_bound.max_observed,
        "edges": lemma_bound.edge_count,
        "witness": _maybe_describe(ball, lemma_bound.witness),
    }
    checks["lemma_bound"] = lemma_bound.passed
    stage("xi")

    axioms = verify_axioms(graph)
    artifacts.axiom_report = axioms
    report["axioms"] = [
        {
            "index": c.index,
            "name": c.name,
            "passed": c.passed,
            "domain": c.domain_size,
            "counterexample": _maybe_describe(ball, c.counterexample),
            "note": c.note,
        }
        for c in axioms.conditions
    ]
    for c in axioms.conditions:
        checks[f"axiom_{c.index}"] = c.passed
    report["subdivisions"] = {
        "vertex_classes": None if axioms.vertex_subdivisions is None else len(axioms.vertex_subdivisions),
        "edge_classes": None if axioms.edge_subdivisions is None else len(axioms.edge_subdivisions),
    }
    stage("axioms")

    qi = verify_qi_bounds(graph, delta)
    empirical_k, extremal, used, exhaustive = estimate_qi_constants(
        graph, sample_pairs=config.qi_samples, seed=config.seed
    )
    qi.empirical_k = empirical_k
    qi.extremal_pair = extremal
    qi.pairs_sampled = used
    qi.exhaustive_pairs = exhaustive
    artifacts.qi_report = qi
    report["qi"] = {
        "checks": [
            {
                "name": c.name,
                "description": c.description,
                "domain": c.domain_size,
                "max_observed": c.max_observed,
                "bound": c.bound,
                "passed": c.passed,
                "witness": _maybe_describe(ball, c.witness),
            }
            for c in qi.checks
        ],
        "empirical_k": empirical_k,
        "extremal_pair": _maybe_describe(ball, extremal),
        "pairs_sampled": used,
        "exhaustive_pairs": exhaustive,
    }
    for c in qi.checks:
        checks[f"qi_{c.name}"] = c.passed
    stage("qi")

    report["checks"] = checks
    report["timings"] = timings
    exit_code = EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED
    return PipelineResult(report, artifacts, exit_code)


def _corrupt_one_label(graph) -> None:
    """Fault injection: overwrite the first vertex label with the first
    different one (makes condition 5 fail when stars differ)."""
    items = sorted(graph.vertex_labels)
    for v in items:
        for w in items:
            if graph.vertex_labels[v] != graph.vertex_labels[w]:
                graph.vertex_labels[v] = graph.vertex_labels[w]
                return
