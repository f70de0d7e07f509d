import random

import pytest

from kronperm.cfkit import ABOVE, CFStream, Convergent, PHI_FRAC, convergents
from kronperm.errors import (
    NotPalindromic,
    OddIndex,
    RationalInput,
    WrongBranch,
)
from kronperm.permutations import build_pi_modular
from kronperm.surd import QuadraticSurd
from kronperm.theorems import (
    CASE_INVOLUTION,
    CASE_QUARTIC_ONE_FIXED,
    CASE_QUARTIC_ONE_TWO_CYCLE,
    CASE_QUARTIC_TWO_FIXED,
    cassini_check,
    expected_fibonacci_case,
    fibonacci,
    fixed_point_completeness_scan,
    predicted_fixed_points,
    two_candidate_check,
    two_candidate_set,
    verify_fibonacci_theorem,
    verify_palindrome_proposition,
    verify_quadratic_theorem,
)

PHI_FRAC_STREAM = CFStream.from_surd(PHI_FRAC)


class TestPalindromeProposition:
    def test_phi_q13_one_fixed_point(self):
        verdict = verify_palindrome_proposition(PHI_FRAC_STREAM, 6)
        assert verdict.case_label == CASE_QUARTIC_ONE_FIXED
        assert verdict.signature.fixed_points == (11,)
        assert 11 == (8 + 1 + 13) // 2  # the odd-q candidate formula
        assert verdict.witnesses == ()

    def test_phi_q3_involution(self):
        verdict = verify_palindrome_proposition(PHI_FRAC_STREAM, 3)
        assert verdict.case_label == CASE_INVOLUTION
        assert verdict.signature.lengths == {2: 1, 1: 1}

    def test_sqrt2_q12_involution_multiples_of_3(self):
        stream = CFStream.from_surd(QuadraticSurd.sqrt(2).frac())
        verdict = verify_palindrome_proposition(stream, 3)
        assert verdict.case_label == CASE_INVOLUTION
        assert verdict.signature.fixed_points == (3, 6, 9, 12)

    def test_non_palindromic_rejected(self):
        stream = CFStream.from_surd(QuadraticSurd.sqrt(3).frac())
        with pytest.raises(NotPalindromic):
            verify_palindrome_proposition(stream, 2)

    def test_branch_dichotomy_pi_squared_or_fourth(self):
        # det +1 -> pi^2 = Id; det -1 -> pi^4 = Id with short cycles confined
        for d in range(2, 21):
            if int(d ** 0.5) ** 2 == d:
                continue
            stream = CFStream.from_surd(QuadraticSurd.sqrt(d).frac())
            exp = QuadraticSurd.sqrt(d).frac().cf_expansion()
            k = len(exp.period)
            for t in range(3):
                j = k - 1 + t * k
                if j < 1:
                    continue
                conv = convergents(stream, j)[-1]
                if conv.q > 3000:
                    break
                perm = build_pi_modular(conv)
                power = {kk: kk for kk in range(1, conv.q + 1)}
                reps = 2 if conv.det_sign == 1 else 4
                for _ in range(reps):
                    power = {kk: perm(v) for kk, v in power.items()}
                assert all(power[kk] == kk for kk in power)


class TestQuadraticTheorem:
    def test_sqrt2_six_periods(self):
        results = verify_quadratic_theorem(QuadraticSurd.sqrt(2), 6)
        assert len(results) >= 5
        assert all(r.conformant for r in results)
        assert all(r.palindromic for r in results)

    def test_sqrt3_prefixes(self):
        results = verify_quadratic_theorem(QuadraticSurd.sqrt(3), 3)
        assert [r.prefix_length for r in results] == [1, 3, 5]
        assert all(r.palindromic and r.conformant for r in results)

    def test_phi_reduces_to_fibonacci_cases(self):
        results = verify_quadratic_theorem(PHI_FRAC, 6)
        labels = {r.verdict.case_label for r in results if r.verdict}
        assert labels <= {CASE_INVOLUTION, CASE_QUARTIC_ONE_FIXED,
                          CASE_QUARTIC_TWO_FIXED, CASE_QUARTIC_ONE_TWO_CYCLE}

    def test_rational_rejected(self):
        with pytest.raises(RationalInput):
            verify_quadratic_theorem(QuadraticSurd(3, 0, 2, 0), 2)

    def test_oversized_prefixes_skipped(self):
        results = verify_quadratic_theorem(QuadraticSurd.sqrt(46), 3, max_q=100)
        assert any(r.note == "size" for r in results)
        assert all(r.conformant for r in results)

    def test_random_small_surds_no_other_verdicts(self):
        rng = random.Random(91)
        seen = 0
        while seen < 50:
            a = rng.randint(-5, 5)
            b = rng.randint(1, 5)
            c = rng.randint(1, 5)
            d = rng.randint(2, 60)
            if int(d ** 0.5) ** 2 == d:
                continue
            surd = QuadraticSurd(a, b, c, d)
            if surd.is_rational:
                continue
            for row in verify_quadratic_theorem(surd, 2, max_q=20_000):
                if row.palindromic:
                    assert row.conformant, (surd, row)
            seen += 1


class TestFibonacciTheorem:
    def test_f7_structure(self):
        verdict = verify_fibonacci_theorem(7)
        assert verdict.case_label == CASE_QUARTIC_ONE_FIXED
        assert verdict.signature.fixed_points == (11,)

    def test_f1_vacuous_quartic(self):
        verdict = verify_fibonacci_theorem(1)
        assert verdict.case_label == CASE_QUARTIC_ONE_FIXED
        assert verdict.signature.lengths == {1: 1}

    def test_f9_single_two_cycle(self):
        verdict = verify_fibonacci_theorem(9)
        assert verdict.case_label == CASE_QUARTIC_ONE_TWO_CYCLE
        two_cycles = [c for c in verdict.signature.cycles if len(c) == 2]
        assert two_cycles == [(11, 28)]
        f8 = fibonacci(8)
        assert {11, 28} == {(f8 + 1) // 2, (f8 + fibonacci(9) + 1) // 2}

    def test_trichotomy_through_20(self):
        for n in range(1, 21):
            verdict = verify_fibonacci_theorem(n)
            assert verdict.case_label == expected_fibonacci_case(n)

    def test_parity_rule(self):
        for n in range(1, 40):
            assert (fibonacci(n) % 2 == 0) == (n % 3 == 0)

    def test_size_limit(self):
        from kronperm.errors import SizeLimit

        with pytest.raises(SizeLimit):
            verify_fibonacci_theorem(30, size_limit=10_000)


class TestFixedPointFamilies:
    def test_r2_m6_multiples_of_5(self):
        family = predicted_fixed_points(2, 6)
        assert family.point_count == 70
        assert family.generator == 5
        assert family.predicted == tuple(range(5, 71, 5))

    def test_r2_m4_multiples_of_3(self):
        family = predicted_fixed_points(2, 4)
        assert family.point_count == 12
        assert family.generator == 3
        assert family.predicted == (3, 6, 9, 12)

    def test_r1_m8_generator_7(self):
        family = predicted_fixed_points(1, 8)
        assert family.point_count == 21
        assert family.generator == 7
        assert family.predicted == (7, 14, 21)

    def test_odd_index_rejected(self):
        with pytest.raises(OddIndex):
            predicted_fixed_points(2, 5)

    def test_predicted_subset_of_actual_small_sweep(self):
        # inclusion is asserted inside the scan; any violation raises
        for r in range(1, 11):
            rows = fixed_point_completeness_scan(r, 20, size_limit=20_000)
            assert rows

    def test_completeness_fixtures(self):
        rows = {row.m: row for row in fixed_point_completeness_scan(2, 6)}
        assert rows[6].q == 70 and rows[6].predicted_count == 14 and rows[6].equal
        assert rows[4].q == 12 and rows[4].predicted_count == 4 and rows[4].equal
        r1 = fixed_point_completeness_scan(1, 20)
        assert all(row.equal for row in r1)
        r6 = fixed_point_completeness_scan(6, 4)
        assert [row.m for row in r6] == [2, 4]


class TestCassini:
    def test_smallest_case(self):
        assert fibonacci(1) * fibonacci(3) - fibonacci(2) ** 2 == 1
        assert cassini_check(3)

    def test_n9_and_n10(self):
        assert 13 * 34 - 21 ** 2 == 1
        assert 21 * 55 - 34 ** 2 == -1
        assert cassini_check(9) and cassini_check(10)

    def test_sweep_to_200(self):
        assert all(cassini_check(n) for n in range(3, 201))

    def test_precondition(self):
        with pytest.raises(ValueError):
            cassini_check(2)


class TestTwoCandidate:
    def test_q13_single_candidate(self):
        conv = convergents(PHI_FRAC_STREAM, 6)[-1]
        assert two_candidate_check(conv) == (11,)

    def test_q34_pair_forms_two_cycle(self):
        conv = convergents(PHI_FRAC_STREAM, 8)[-1]
        assert conv.q == 34 and conv.p == 21
        assert two_candidate_check(conv) == (11, 28)
        perm = build_pi_modular(conv)
        assert perm(11) == 28 and perm(28) == 11

    def test_q1_degenerate(self):
        conv = Convergent(index=0, p=0, q=1, side=ABOVE, det_sign=-1)
        assert two_candidate_check(conv) == (1,)

    def test_wrong_branch_rejected(self):
        conv = convergents(PHI_FRAC_STREAM, 7)[-1]
        assert conv.det_sign == 1
        with pytest.raises(WrongBranch):
            two_candidate_check(conv)

    def test_candidate_set_sizes(self):
        assert len(two_candidate_set(8, 13)) == 1
        assert len(two_candidate_set(21, 34)) == 2
