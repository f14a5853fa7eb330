"""Acceptance gate: one test per shipped guarantee.

Each test drives the corresponding verification check (the same code
the ``verify`` CLI verb runs), prints a single PASS/FAIL line with the
measured detail, and asserts.  Tolerances are pinned here: exact
equality for tropical and boolean results, 1e-9 relative for float
comparisons, 1e-4 for gradient agreement.  The two oracle sweeps must
each finish within five seconds.
"""

import time

from polyspan import verify

BUDGET_SECONDS = 5.0


def report(name: str, result, extra: str = ""):
    tag = "PASS" if result.passed else "FAIL"
    suffix = f" [{extra}]" if extra else ""
    print(f"{tag} {name}: {result.detail}{suffix}")
    assert result.passed, f"{name}: {result.detail}"


def test_single_source_distances_match_oracle():
    t0 = time.monotonic()
    result = verify.check_bellman_ford_equivalence(seed=0, cases=200)
    elapsed = time.monotonic() - t0
    report("single-source distances vs oracle (exact)", result, f"{elapsed:.2f}s")
    assert elapsed < BUDGET_SECONDS, f"took {elapsed:.2f}s, budget {BUDGET_SECONDS}s"


def test_all_pairs_distances_match_oracle():
    t0 = time.monotonic()
    result = verify.check_floyd_warshall_equivalence(seed=0, cases=200)
    elapsed = time.monotonic() - t0
    report("all-pairs distances vs oracle (exact)", result, f"{elapsed:.2f}s")
    assert elapsed < BUDGET_SECONDS, f"took {elapsed:.2f}s, budget {BUDGET_SECONDS}s"


def test_sweep_equals_relaxation_recurrence():
    result = verify.check_relaxation_formula(seed=0, cases=50)
    report("one sweep equals the relaxation recurrence (exact)", result)


def test_semiring_laws_hold_and_broken_control_is_caught():
    result = verify.check_algebra_laws(seed=0, samples=1000)
    report("semiring and container laws, 1000 samples per law", result)


def test_layers_are_permutation_equivariant():
    result = verify.check_equivariance(seed=0, cases=50, tol=1e-9)
    report("permutation equivariance of all three layers (rel 1e-9)", result)


def test_span_layer_matches_loop_layer():
    result = verify.check_mpnn_correspondence(seed=0, cases=50, tol=1e-9)
    report("span-engine layer vs loop-written layer (rel 1e-9)", result)


def test_triple_layer_reproduces_all_pairs_sweep():
    result = verify.check_v3_fw_alignment(seed=0, cases=50)
    report("triple layer reproduces the all-pairs sweep (exact)", result)


def test_backprop_matches_finite_differences():
    result = verify.check_gradients(seed=0, cases=20, tol=1e-4)
    report("analytic gradients vs finite differences (rel 1e-4)", result)


def test_edge_writing_span_is_rejected():
    result = verify.check_edge_output_pathology()
    report("edge-writing output map rejected at validation", result)


def test_cli_output_is_deterministic():
    result = verify.check_cli_determinism(seed=0)
    report("CLI output byte-identical across runs", result)


def test_structural_invariants_hold():
    # Staging, monotonicity, inert self-loops, boolean reachability.
    result = verify.check_span_properties(seed=0)
    report("structural invariants of the transform pipeline", result)
