import pytest

from fluvius_navem.validation import SUITES, SuiteResult, check_backprop, check_patch_test, run_validation


def test_suite_result_line():
    line = str(SuiteResult("quadrature", True, 3.2e-15, 1e-12))
    assert line.startswith("PASS  quadrature")
    assert "3.200e-15" in line
    assert str(SuiteResult("backprop", False, 0.1, 1e-5)).startswith("FAIL")


def test_fast_suites():
    results = run_validation(["quadrature", "law-tangents", "linear-newton"])
    assert [r.name for r in results] == ["quadrature", "law-tangents", "linear-newton"]
    assert all(r.passed for r in results), [str(r) for r in results]


def test_suite_names():
    assert set(SUITES) == {
        "projector", "patch-test", "law-tangents", "assembly-tangent", "quadrature", "phi-residual", "backprop",
        "linear-newton"}


@pytest.mark.slow
def test_patch_test_suite():
    result = check_patch_test(n_meshes=6)
    assert result.passed, str(result)


@pytest.mark.slow
def test_backprop_suite():
    result = check_backprop(n_entries=20)
    assert result.passed, str(result)
