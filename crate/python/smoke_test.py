"""Smoke test for the coxfock_py extension module."""

import json
import math

import coxfock_py as cf


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    s4 = cf.CoxeterGroup("A3")
    assert s4.order == 24 and s4.rank == 3
    assert s4.length_counts() == [1, 3, 5, 6, 5, 3, 1]
    assert s4.length(s4.longest_word()) == 6
    assert s4.euler_solomon(s4.longest_word()) == 1
    assert s4.euler_solomon([]) == 0
    assert s4.scalar_positivity(0.5) > 0

    h3 = cf.CoxeterGroup([[1, 5, 2], [5, 1, 3], [2, 3, 1]])
    assert h3.order == 120

    s3 = cf.CoxeterGroup("A2")
    alpha = s3.blocklength_threshold()
    assert -1 < alpha < 0
    assert s3.blocklength_min_eig(alpha + 1e-3) >= 0

    # single variable: moments are Touchard-Riordan polynomials
    q = 0.3
    assert close(cf.wick_moment([0, 0, 0, 0], [[q]]).real, 2 + q)

    qm = [[0.7, complex(-0.2, 0.6)], [complex(-0.2, -0.6), -0.4]]
    fs = cf.FockSpace(qm, levels=3)
    assert fs.dim == 2 and fs.levels == 3
    assert all(passed for _, _, passed in fs.checks()), fs.checks()
    word = [0, 1, 0, 1]
    assert close(fs.moment(word), cf.wick_moment(word, qm))
    assert close(fs.moment(word), qm[1][0])
    trials = fs.sandwich(seed=1, trials=5)
    assert len(trials) == 5 and all(t[3] for t in trials)
    norm, bound = fs.tensor_square_norm(2)
    assert norm <= bound

    one = cf.FockSpace([[0.75]], levels=8)
    expected = max(math.sqrt(sum(0.75**j for j in range(n))) for n in range(1, 9))
    assert close(one.annihilator_norm(0), expected)

    passed, text = cf.run_scenario('kind = "coxeter"\ngroup = "A2"\n', structured=True)
    report = json.loads(text)
    assert passed and report["observations"]["order"] == "6"

    passed, _ = cf.run_scenario(cf.generate_scenario("fock", 7))
    assert passed

    try:
        cf.FockSpace([[0.0, 0.5], [0.2, 0.0]])
    except ValueError as e:
        assert "ermitian" in str(e)
    else:
        raise AssertionError("non-Hermitian q accepted")

    print(f"coxfock_py {cf.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
