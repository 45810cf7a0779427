import numpy as np

from natgrowth.properties import LEMMA_CHECKS, gradient_check, gradient_suite, nonlinearity_suite, run_all


def test_lemma_checks_pass_for_several_mu():
    for mu in (0.5, 1.0, 2.0):
        for check in LEMMA_CHECKS:
            if check.__name__ == "small_decay" and mu != 1.0:
                continue
            res = check(mu)
            assert res.passed, (mu, res)


def test_nonlinearity_suite():
    assert all(r.passed for r in nonlinearity_suite())


def test_gradient_suite_and_check_shape():
    assert all(r.passed for r in gradient_suite())
    errs, I = gradient_check(pairs=3)
    assert errs.shape == (3, 3) and np.all(np.isfinite(I))


def test_run_all_labels():
    suites = {s for s, _ in run_all()}
    assert suites == {"nonlinearity", "gradient"}
