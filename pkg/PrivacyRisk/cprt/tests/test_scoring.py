from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from cprt.exceptions import LengthMismatchError, OutOfRangeError
from cprt.scoring import (
    LevelCounts,
    check_properties,
    counts_from_attributes,
    counts_from_vector,
    determined_level,
    enumerate_combinations,
    lex_score,
    score_attribute_vector,
    severity_score,
)
from cprt.taxonomy import AttributeSpec, BoundarySet, minimal_valid_weights

from .factories import canonical_registry, vector_for
from .hypothesis_profiles import STANDARD_SETTINGS


def level_counts():
    return st.builds(
        LevelCounts,
        st.integers(0, 3), st.integers(0, 10), st.integers(0, 5), st.integers(0, 4),
    )


class SeverityScoreTests(SimpleTestCase):
    def setUp(self):
        self.registry = canonical_registry()

    def test_reference_values(self):
        """Known scores on the canonical taxonomy"""
        self.assertAlmostEqual(severity_score((2, 10, 5, 4), self.registry).value, 0.94691, places=5)
        self.assertAlmostEqual(severity_score((1, 10, 0, 0), self.registry).value, 0.87017, places=5)

    def test_single_attribute_hits_lower_edge(self):
        """One attribute of level k scores exactly b_min(k)"""
        self.assertEqual(severity_score((1, 0, 0, 0), self.registry).value, 0.711)
        self.assertEqual(severity_score((0, 1, 0, 0), self.registry).value, 0.514)
        self.assertEqual(severity_score((0, 0, 1, 0), self.registry).value, 0.292)
        self.assertEqual(severity_score((0, 0, 0, 1), self.registry).value, 0.0)

    def test_level_one_maximum(self):
        """Every attribute present scores exactly 1.0"""
        score = severity_score((3, 10, 5, 4), self.registry)
        self.assertEqual(score.value, 1.0)
        self.assertEqual(score.label, 'L1')

    def test_lower_level_maximum_stays_below_next_edge(self):
        """A saturated level-2 image stays strictly under 0.711"""
        score = severity_score((0, 10, 5, 4), self.registry)
        self.assertLess(score.value, 0.711)
        self.assertEqual(self.registry.boundaries.bucketize(score.value), 2)

    def test_empty_counts_are_safe(self):
        """No attributes scores 0.0 with no determined level"""
        score = severity_score((0, 0, 0, 0), self.registry)
        self.assertEqual(score.value, 0.0)
        self.assertIsNone(score.determined_level)
        self.assertEqual(score.to_dict(), {'score': 0.0, 'level': None, 'label': 'safe'})

    def test_counts_above_cardinality(self):
        """Counts cannot exceed the number of attributes at a level"""
        with self.assertRaises(OutOfRangeError):
            severity_score((4, 0, 0, 0), self.registry)

    def test_negative_counts(self):
        with self.assertRaises(OutOfRangeError):
            LevelCounts(0, -1, 0, 0)

    def test_lex_score_ignores_higher_levels(self):
        """The lexicographic score only sums from the determined level down"""
        self.assertEqual(lex_score((0, 2, 1, 1), self.registry.weights), 66)
        self.assertEqual(determined_level((0, 0, 2, 1)), 3)
        self.assertEqual(lex_score((0, 0, 0, 0), self.registry.weights), 0)

    def test_custom_boundaries(self):
        """Scores move with the boundary set"""
        registry = self.registry.with_boundaries(BoundarySet((0.8, 0.6, 0.3, 0.0)))
        self.assertEqual(severity_score((0, 1, 0, 0), registry).value, 0.6)

    @given(level_counts())
    @STANDARD_SETTINGS
    def test_score_is_deterministic_and_in_range(self, counts):
        """Same counts give the same score, always inside [0, 1]"""
        first = severity_score(counts, self.registry)
        second = severity_score(counts, self.registry)
        self.assertEqual(first, second)
        self.assertTrue(0.0 <= first.value <= 1.0)
        if first.determined_level is not None:
            self.assertEqual(self.registry.boundaries.bucketize(first.value), first.determined_level)

    @given(level_counts(), st.integers(1, 4))
    @STANDARD_SETTINGS
    def test_adding_an_attribute_never_lowers_the_score(self, counts, level):
        """Adding an attribute at or below the determined level strictly raises the score"""
        if counts[level] >= self.registry.cardinalities[level - 1]:
            return
        before = severity_score(counts, self.registry)
        after = severity_score(counts.increment(level), self.registry)
        if before.determined_level is None:
            # a lone level-4 attribute scores 0.0 like an empty image
            self.assertGreaterEqual(after.value, before.value)
        else:
            self.assertGreater(after.value, before.value)


class CountConversionTests(SimpleTestCase):
    def setUp(self):
        self.registry = canonical_registry()

    def test_counts_from_vector(self):
        vector = vector_for(self.registry, ['biometrics', 'age', 'gender', 'metadata'])
        self.assertEqual(counts_from_vector(vector, self.registry), LevelCounts(1, 0, 2, 1))

    def test_vector_length_checked(self):
        with self.assertRaises(LengthMismatchError):
            counts_from_vector([1, 0], self.registry)

    def test_vector_must_be_binary(self):
        vector = [0] * len(self.registry)
        vector[0] = 0.5
        with self.assertRaises(OutOfRangeError):
            counts_from_vector(vector, self.registry)

    def test_unknown_attribute(self):
        with self.assertRaises(KeyError):
            counts_from_attributes(['biometrics', 'shoe_size'], self.registry)

    def test_score_attribute_vector(self):
        """Attribute vectors score the same as their level counts"""
        vector = vector_for(self.registry, ['full_legal_name', 'location'])
        self.assertEqual(
            score_attribute_vector(vector, self.registry),
            severity_score((0, 1, 1, 0), self.registry),
        )


class PropertyCheckTests(SimpleTestCase):
    def test_canonical_taxonomy_passes(self):
        """All 1320 combinations satisfy every property"""
        registry = canonical_registry()
        self.assertEqual(len(list(enumerate_combinations(registry.cardinalities))), 1320)
        report = check_properties(registry)
        self.assertEqual(report.combinations, 1320)
        self.assertTrue(report.passed)
        self.assertIsNone(report.counterexample)
        self.assertEqual(report.checked['L1'][1], 1.0)
        self.assertEqual(report.checked['L4'][0], 0.0)

    def test_extended_taxonomy_passes(self):
        """Adding a level-2 attribute with recomputed weights keeps every property"""
        registry = canonical_registry()
        spec = AttributeSpec('emotional_inference', 'Emotional inference', 'Sensitive inferences', (False, True, False, False))
        extended = registry.with_attribute(spec, weights=minimal_valid_weights((3, 11, 5, 4)))
        report = check_properties(extended)
        self.assertEqual(report.combinations, 1440)
        self.assertTrue(report.passed)

    def test_alternative_boundaries_pass(self):
        """The properties hold for any valid boundary set"""
        registry = canonical_registry().with_boundaries(BoundarySet((0.9, 0.5, 0.1, 0.0)))
        self.assertTrue(check_properties(registry).passed)
