"""Access to the classifier spec files shipped inside the package."""

from __future__ import annotations

import json
from importlib import resources

from .model import Classifier, classifier_from_dict

BUILTIN_SPECS = ("fig1.json", "fig3.json", "linear.json",
                 "refined_linear.json", "generalized_linear.json",
                 "trivial.json")


def builtin_spec_text(name: str) -> str:
    if name not in BUILTIN_SPECS:
        raise KeyError(f"unknown builtin spec {name!r}; have {BUILTIN_SPECS}")
    return resources.files("coverage_lab").joinpath("specs", name).read_text(
        encoding="utf-8")


def load_builtin(name: str) -> Classifier:
    return classifier_from_dict(json.loads(builtin_spec_text(name)))
