"""Acceptance gate: every deterministic bound and drift criterion the library
promises, at the default verification scale.

Each test prints its one-line pass/fail summary (visible with ``pytest -s``)
and asserts the check passed.  ``randcube verify --scale default`` runs the
same checks from the command line.
"""

import os

import pytest

from randcube.verify import (
    SCALES,
    check_boundary_examples,
    check_chain_complex,
    check_cube_counting,
    check_determinism,
    check_gap_bounds,
    check_inequalities,
    check_k_triangle,
    check_lln_drift,
    check_mgf_structure,
    check_rate_zero,
)

SCALE = SCALES["default"]
JOBS = min(4, os.cpu_count() or 1)


def run(check):
    result = check(SCALE, JOBS)
    print(result.line())
    assert result.passed, result.line()
    return result


def test_criterion_01_boundary_fidelity():
    run(check_boundary_examples)


def test_criterion_02_chain_complex_law():
    run(check_chain_complex)


def test_criterion_03_cube_counting():
    run(check_cube_counting)


def test_criterion_04_k_triangle_lemma():
    run(check_k_triangle)


def test_criterion_05_inequality_suite():
    run(check_inequalities)


def test_criterion_06_gap_bounds():
    result = run(check_gap_bounds)
    assert result.worst_margin >= 0.0


def test_criterion_07_log_mgf_structure():
    run(check_mgf_structure)


def test_criterion_08_rate_function_zero():
    run(check_rate_zero)


def test_criterion_09_lln_drift():
    run(check_lln_drift)


def test_criterion_10_determinism_across_jobs():
    run(check_determinism)
