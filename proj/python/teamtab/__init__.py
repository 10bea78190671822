"""Validity prover and model checker for propositional and modal team logics."""

import json

from teamtab._teamtab import (
    Formula,
    ParseError,
    TeamtabError,
    dual,
    eliminate_dep,
    nnf_import,
    parse,
    root_size,
    valid_prop,
)
from teamtab import _teamtab as _core

__all__ = [
    "Formula",
    "ParseError",
    "TeamtabError",
    "check_certificate",
    "certify",
    "dual",
    "eliminate_dep",
    "nnf_import",
    "parse",
    "prove",
    "root_size",
    "satisfies",
    "search_countermodel",
    "valid",
    "valid_prop",
]


def _formula(phi):
    return parse(phi) if isinstance(phi, str) else phi


def prove(phi, node_limit=2_000_000, trace=False):
    """Runs the tableau; returns the proof document as a dict."""
    return json.loads(_core.prove_json(_formula(phi), node_limit, trace))


def valid(phi, node_limit=2_000_000):
    return prove(phi, node_limit)["verdict"] == "closed"


def satisfies(phi, team=None, model=None):
    """Team semantics on a propositional team or a Kripke model with a team.

    Both take the dict layout of the JSON files the command line reads.
    """
    if (team is None) == (model is None):
        raise ValueError("give exactly one of team= or model=")
    if team is not None:
        return _core.satisfies_team_json(json.dumps(team), _formula(phi))
    return _core.satisfies_model_json(json.dumps(model), _formula(phi))


def search_countermodel(phi, max_worlds=3):
    """Bounded search; None is not a validity proof."""
    found = _core.search_modal_countermodel_json(_formula(phi), max_worlds)
    return None if found is None else json.loads(found)


def certify(phi):
    found = _core.certify_json(_formula(phi))
    return None if found is None else json.loads(found)


def check_certificate(certificate):
    """Returns (accepted, diagnostic)."""
    return _core.check_certificate_json(json.dumps(certificate))
