# Copyright (c) 2026, The unimodal authors
# SPDX-License-Identifier: Apache-2.0
"""Unimodality-constrained ordinal classification."""

from ._core import (
    ConfigError,
    DomainError,
    IoError,
    ParseError,
    TrainingError,
    UsageError,
    ValidationError,
    gen_data_csv,
    generate,
    ld_target,
    loss,
    loss_and_grad,
    mae,
    po_distribution,
    predict_argmax,
    predict_expectation,
    report,
    run_experiment,
    soi,
    softmax,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "IoError",
    "ParseError",
    "TrainingError",
    "UsageError",
    "ValidationError",
    "gen_data_csv",
    "generate",
    "ld_target",
    "loss",
    "loss_and_grad",
    "mae",
    "po_distribution",
    "predict_argmax",
    "predict_expectation",
    "report",
    "run_experiment",
    "soi",
    "softmax",
]
