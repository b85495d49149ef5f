"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 KB load/parse error,
4 endpoint failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .kb import KnowledgeBaseError, load_knowledge_base
from .ntriples import NTriplesError
from .quality import LearningProblemError, load_learning_problem
from .reasoner import classify
from .runner import ConfigError, run_learning
from .sparql import EndpointError, load_remote_vocabulary, make_remote_retrieval

EXIT_CONFIG = 2
EXIT_KB = 3
EXIT_ENDPOINT = 4


@click.group()
def main():
    """Learn OWL class expressions from positive/negative examples."""


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_lp(lp_arg: str):
    text = lp_arg
    path = Path(lp_arg)
    if not lp_arg.lstrip().startswith("{"):
        if not path.exists():
            _fail(EXIT_CONFIG, f"learning problem file not found: {lp_arg}")
        text = path.read_text(encoding="utf-8")
    try:
        return load_learning_problem(text)
    except LearningProblemError as exc:
        _fail(EXIT_CONFIG, str(exc))


def _load_backend(kb_path, endpoint):
    if (kb_path is None) == (endpoint is None):
        _fail(EXIT_CONFIG, "exactly one of --kb and --endpoint must be given")
    if kb_path is not None:
        try:
            kb = load_knowledge_base(kb_path)
        except FileNotFoundError:
            _fail(EXIT_KB, f"ontology file not found: {kb_path}")
        except (NTriplesError, KnowledgeBaseError, UnicodeDecodeError) as exc:
            _fail(EXIT_KB, str(exc))
        return kb, classify(kb), None
    try:
        kb = load_remote_vocabulary(endpoint)
    except EndpointError as exc:
        _fail(EXIT_ENDPOINT, str(exc))
    hierarchy = classify(kb)
    return kb, hierarchy, make_remote_retrieval(endpoint, hierarchy)


@main.command()
@click.option("--kb", "kb_path", type=str, default=None,
              help="Path to an N-Triples ontology file.")
@click.option("--endpoint", type=str, default=None, envvar="CONCEPTLEARN_ENDPOINT",
              help="SPARQL endpoint URL (triplestore mode).")
@click.option("--lp", "lp_arg", required=True,
              help="Learning problem: JSON file path or inline JSON.")
@click.option("--learner", type=click.Choice(["celoe", "ocel", "evo"]), default="celoe")
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
@click.option("--seed", type=int, default=0)
@click.option("--max-runtime", type=float, default=None, help="Seconds.")
@click.option("--max-iterations", type=int, default=None)
@click.option("--max-length", type=int, default=None, help="Hypothesis length cap.")
@click.option("--quality-function", type=click.Choice(["f1", "accuracy"]), default=None)
@click.option("--population-size", type=int, default=None, help="Evo learner.")
@click.option("--generations", type=int, default=None, help="Evo learner.")
@click.option("--emit-sparql", is_flag=True, help="Attach a SPARQL query per hypothesis.")
@click.option("--verbalize", "verbalize_flag", is_flag=True,
              help="Attach an English sentence per hypothesis.")
def learn(kb_path, endpoint, lp_arg, learner, output, seed, max_runtime,
          max_iterations, max_length, quality_function, population_size,
          generations, emit_sparql, verbalize_flag):
    """Run a learner over a learning problem and print ranked hypotheses."""
    kb, hierarchy, retrieval_fn = _load_backend(kb_path, endpoint)
    lp = _load_lp(lp_arg)
    overrides = {"random_seed": seed}
    if learner == "evo":
        if population_size is not None:
            overrides["population_size"] = population_size
        if generations is not None:
            overrides["generations"] = generations
        if max_length is not None:
            overrides["max_tree_length"] = max_length
    else:
        if max_runtime is not None:
            overrides["max_runtime_seconds"] = max_runtime
        if max_iterations is not None:
            overrides["max_iterations"] = max_iterations
        if max_length is not None:
            overrides["max_hypothesis_length"] = max_length
        if quality_function is not None:
            overrides["quality_function"] = quality_function
    try:
        report = run_learning(kb, hierarchy, lp, learner=learner,
                              config_overrides=overrides,
                              emit_sparql=emit_sparql,
                              emit_verbalization=verbalize_flag,
                              retrieval_fn=retrieval_fn)
    except (ConfigError, LearningProblemError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except EndpointError as exc:
        _fail(EXIT_ENDPOINT, str(exc))
    if output == "json":
        click.echo(json.dumps(report, indent=2))
    else:
        _print_text(report)


def _print_text(report: dict):
    for rank, hyp in enumerate(report["hypotheses"], start=1):
        click.echo(f"{rank}. {hyp['dl']}")
        click.echo(f"   manchester: {hyp['manchester']}")
        click.echo(f"   f1={hyp['f1']:.4f} accuracy={hyp['accuracy']:.4f} "
                   f"length={hyp['length']}")
        if "verbalization" in hyp:
            click.echo(f"   english: {hyp['verbalization']}")
        if "sparql" in hyp:
            click.echo("   sparql:")
            for line in hyp["sparql"].splitlines():
                click.echo(f"     {line}")
    stats = " ".join(f"{k}={v}" for k, v in report["stats"].items())
    click.echo(f"-- {stats}")


@main.command()
@click.option("--kb", "kb_path", type=str, required=True,
              help="Path to an N-Triples ontology file.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(kb_path, host, port):
    """Serve the learning engine over HTTP (POST /learn, GET /health)."""
    import uvicorn

    from .service import create_app

    try:
        kb = load_knowledge_base(kb_path)
    except FileNotFoundError:
        _fail(EXIT_KB, f"ontology file not found: {kb_path}")
    except (NTriplesError, KnowledgeBaseError, UnicodeDecodeError) as exc:
        _fail(EXIT_KB, str(exc))
    uvicorn.run(create_app(kb), host=host, port=port)


if __name__ == "__main__":
    main()
