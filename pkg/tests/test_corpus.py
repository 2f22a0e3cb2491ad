import pytest
from hypothesis import given
from hypothesis import strategies as st

from oodeval.corpus import (
    EFEVER_NEI_SENTINEL,
    FilterReport,
    TieError,
    filter_efever,
    harmonize,
    majority_label,
    make_subsets,
)
from oodeval.labels import Label, merge_to_binary
from oodeval.records import Instance


def inst(iid, label=None, explanation=None, native=None, premises=None, hypothesis="h", premise="p"):
    return Instance(
        id=iid,
        dataset="d",
        split="train",
        hypothesis=hypothesis,
        premise=premise,
        label=label,
        explanation=explanation,
        native=native,
        premises=premises,
    )


class TestFilterEfever:
    def test_sentinel_with_wrong_label_removed(self):
        bad = inst("a", Label.ENTAILMENT, EFEVER_NEI_SENTINEL)
        assert filter_efever([bad]) == []

    def test_sentinel_with_nei_label_kept(self):
        ok = inst("a", Label.NEUTRAL, EFEVER_NEI_SENTINEL)
        assert filter_efever([ok]) == [ok]

    def test_claim_repeat_with_supports_kept(self):
        ok = inst("a", Label.ENTAILMENT, "The claim.", hypothesis="The claim.")
        assert filter_efever([ok]) == [ok]

    def test_claim_repeat_without_supports_removed(self):
        bad = inst("a", Label.CONTRADICTION, "The claim.", hypothesis="The claim.")
        assert filter_efever([bad]) == []

    def test_repeat_matching_ignores_case_and_whitespace(self):
        bad = inst("a", Label.NEUTRAL, "  the   CLAIM. ", hypothesis="The claim.")
        assert filter_efever([bad]) == []

    def test_missing_explanation_rejected(self):
        with pytest.raises(ValueError, match="explanation"):
            filter_efever([inst("a", Label.NEUTRAL)])

    def test_subsequence_and_idempotent(self):
        items = [
            inst("a", Label.ENTAILMENT, "fine explanation"),
            inst("b", Label.ENTAILMENT, EFEVER_NEI_SENTINEL),
            inst("c", Label.NEUTRAL, "another"),
        ]
        once = filter_efever(items)
        assert [i.id for i in once] == ["a", "c"]
        assert filter_efever(once) == once

    def test_per_rule_counts(self):
        report = FilterReport()
        items = [
            inst("a", Label.ENTAILMENT, EFEVER_NEI_SENTINEL),
            inst("b", Label.NEUTRAL, "same text", hypothesis="same text"),
            inst("c", Label.NEUTRAL, "kept"),
        ]
        filter_efever(items, report)
        assert report.removed_nei_sentinel == 1
        assert report.removed_claim_repeat == 1
        assert report.removed == 2


class TestHarmonize:
    def test_addonerte_high_score(self):
        out = harmonize(inst("a", native=4.2), "addonerte")
        assert out.label is Label.ENTAILMENT

    def test_addonerte_low_score(self):
        out = harmonize(inst("a", native=2.0), "addonerte")
        assert out.label is Label.NOT_ENTAILMENT

    def test_addonerte_middle_dropped(self):
        assert harmonize(inst("a", native=3.5), "addonerte") is None

    def test_addonerte_boundaries(self):
        assert harmonize(inst("a", native=4.0), "addonerte").label is Label.ENTAILMENT
        assert harmonize(inst("a", native=3.0), "addonerte").label is Label.NOT_ENTAILMENT

    def test_addonerte_out_of_range(self):
        with pytest.raises(ValueError, match="outside"):
            harmonize(inst("a", native=6.0), "addonerte")

    @pytest.mark.parametrize(
        "native,expected",
        [
            ("very likely", Label.ENTAILMENT),
            ("likely", Label.NEUTRAL),
            ("plausible", Label.NEUTRAL),
            ("technically possible", Label.NEUTRAL),
            ("impossible", Label.CONTRADICTION),
        ],
    )
    def test_joci_mapping(self, native, expected):
        assert harmonize(inst("a", native=native), "joci").label is expected

    def test_joci_unknown_category(self):
        with pytest.raises(ValueError, match="unknown JOCI"):
            harmonize(inst("a", native="certain"), "joci")

    def test_mpe_concatenates_premises(self):
        out = harmonize(
            inst("a", premises=("A man sits.", "A dog barks.")), "mpe"
        )
        assert out.premise == "A man sits. A dog barks."
        assert out.premises is None

    def test_mpe_adds_terminal_punctuation(self):
        out = harmonize(inst("a", premises=("No dot here", "Done.")), "mpe")
        assert out.premise == "No dot here. Done."

    def test_factcc(self):
        assert harmonize(inst("a", native="factual"), "factcc").label is Label.ENTAILMENT
        assert (
            harmonize(inst("a", native="non-factual"), "factcc").label
            is Label.NOT_ENTAILMENT
        )

    def test_efever_native_mapping(self):
        assert harmonize(inst("a", native="SUPPORTS"), "e-fever").label is Label.ENTAILMENT
        assert harmonize(inst("a", native="REFUTES"), "e-fever").label is Label.CONTRADICTION
        assert harmonize(inst("a", native="NOT ENOUGH INFO"), "e-fever").label is Label.NEUTRAL

    def test_majority_rule_datasets(self):
        out = harmonize(
            inst("a", native=["entailment", "entailment", "not_entailment"]),
            "qags_cnn",
        )
        assert out.label is Label.ENTAILMENT

    def test_unknown_rule(self):
        with pytest.raises(ValueError, match="unknown preprocessing rule"):
            harmonize(inst("a"), "nope")


class TestMajorityLabel:
    def test_strict_majority(self):
        labels = [Label.ENTAILMENT, Label.ENTAILMENT, Label.NOT_ENTAILMENT]
        assert majority_label(labels) is Label.ENTAILMENT

    def test_singleton(self):
        assert majority_label([Label.ENTAILMENT]) is Label.ENTAILMENT

    def test_tie_is_error(self):
        with pytest.raises(TieError) as err:
            majority_label([Label.ENTAILMENT, Label.NOT_ENTAILMENT])
        assert set(err.value.tied) == {Label.ENTAILMENT, Label.NOT_ENTAILMENT}

    def test_empty_is_error(self):
        with pytest.raises(ValueError, match="empty"):
            majority_label([])

    @given(st.lists(st.sampled_from(list(Label)), min_size=1, max_size=15))
    def test_winner_strictly_exceeds_others(self, labels):
        try:
            winner = majority_label(labels)
        except TieError:
            return
        counts = {l: labels.count(l) for l in set(labels)}
        assert all(counts[winner] > c for l, c in counts.items() if l is not winner)


class TestMakeSubsets:
    def _instances(self, n):
        return [inst(f"i{i:04d}", Label.ENTAILMENT, "e") for i in range(n)]

    def test_exact_partition(self):
        subsets = make_subsets(self._instances(10), 2, 5, seed=3)
        all_ids = [i for s in subsets for i in s.instance_ids]
        assert len(all_ids) == 10
        assert len(set(all_ids)) == 10

    def test_disjoint_and_sized(self):
        subsets = make_subsets(self._instances(100), 3, 20, seed=9)
        seen = set()
        for s in subsets:
            assert len(s.instance_ids) == 20
            assert not (set(s.instance_ids) & seen)
            seen |= set(s.instance_ids)

    def test_deterministic(self):
        items = self._instances(50)
        assert make_subsets(items, 4, 10, seed=5) == make_subsets(items, 4, 10, seed=5)

    def test_seed_changes_draw(self):
        items = self._instances(50)
        assert make_subsets(items, 1, 25, seed=1) != make_subsets(items, 1, 25, seed=2)

    def test_shortfall_error_states_amount(self):
        with pytest.raises(ValueError, match="short by 5"):
            make_subsets(self._instances(15), 2, 10, seed=0)


class TestMergeToBinary:
    @pytest.mark.parametrize(
        "label,expected",
        [
            (Label.ENTAILMENT, Label.ENTAILMENT),
            (Label.NEUTRAL, Label.NOT_ENTAILMENT),
            (Label.CONTRADICTION, Label.NOT_ENTAILMENT),
            (Label.NOT_ENTAILMENT, Label.NOT_ENTAILMENT),
        ],
    )
    def test_mapping(self, label, expected):
        assert merge_to_binary(label) is expected

    @given(st.sampled_from(list(Label)))
    def test_idempotent(self, label):
        once = merge_to_binary(label)
        assert merge_to_binary(once) is once
