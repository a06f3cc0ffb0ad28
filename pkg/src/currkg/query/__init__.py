"""SELECT-subset query parsing and evaluation, plus the bundled competency questions."""

from importlib import resources

from ..rdf.graph import Graph
from .engine import ResultTable, UnboundPrefixError, default_aliases, evaluate, order_key, parse_aliases, run_query
from .parser import Query, QuerySyntaxError, UnsupportedFeatureError, parse_query

NAMED_CQS = ("CQ1", "CQ2", "CQ3", "CQ4", "CQ5")


def named_cq_text(name: str) -> str:
    key = name.upper()
    if key not in NAMED_CQS:
        raise KeyError(f"unknown competency question {name!r}; choose from {', '.join(NAMED_CQS)}")
    return resources.files(__name__).joinpath(f"cqs/{key.lower()}.rq").read_text("utf-8")


def run_named_cq(name: str, graph: Graph) -> ResultTable:
    return run_query(named_cq_text(name), graph)


__all__ = [
    "NAMED_CQS",
    "Query",
    "QuerySyntaxError",
    "ResultTable",
    "UnboundPrefixError",
    "UnsupportedFeatureError",
    "default_aliases",
    "evaluate",
    "named_cq_text",
    "order_key",
    "parse_aliases",
    "parse_query",
    "run_named_cq",
    "run_query",
]
