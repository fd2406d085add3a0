import pytest

from smartnote.errors import NoLabelFound
from smartnote.llm import CompletionParams, MockProvider, parse_classification
from smartnote.llm.providers import merge_handler


def test_default_params_are_near_deterministic():
    params = CompletionParams()
    assert params.temperature == 0.0
    assert params.top_p == 0.1


@pytest.mark.parametrize("kwargs", [
    {"temperature": -0.1}, {"temperature": 2.5},
    {"top_p": 0.0}, {"top_p": 1.5},
])
def test_param_ranges_validated(kwargs):
    with pytest.raises(ValueError):
        CompletionParams(**kwargs)


def test_mock_is_deterministic_per_prompt():
    p = MockProvider()
    a = p.complete("some prompt", CompletionParams())
    b = p.complete("some prompt", CompletionParams())
    assert a == b
    assert a != p.complete("another prompt", CompletionParams())


def test_mock_resolution_order_scripted_then_handler_then_hash():
    p = MockProvider(
        scripted={"x": "scripted"},
        handlers={"x": lambda _: "handler", "y": lambda _: "handler"},
    )
    assert p.complete("p", CompletionParams(), template_id="x") == "scripted"
    assert p.complete("p", CompletionParams(), template_id="y") == "handler"
    assert p.complete("p", CompletionParams(), template_id="z").startswith("mock:")
    assert p.call_count == 3
    assert p.calls == ["x", "y", "z"]


def test_merge_handler_joins_entries():
    prompt = "<entries>\n<entry>Fixed A.</entry>\n<entry>Fixed B.</entry>\n</entries>"
    assert merge_handler(prompt) == "Fixed A.; Fixed B."


class TestParseClassification:
    LABELS = ["Application Software", "System Software",
              "Libraries & Frameworks", "Software Tools"]

    def test_exact_label(self):
        assert parse_classification("Software Tools", self.LABELS) == "Software Tools"

    def test_label_embedded_in_chatter(self):
        raw = "The project is best described as System Software overall."
        assert parse_classification(raw, self.LABELS) == "System Software"

    def test_ampersand_alias(self):
        raw = "libraries and frameworks"
        assert parse_classification(raw, self.LABELS) == "Libraries & Frameworks"

    def test_singular_alias(self):
        assert parse_classification("software tool", self.LABELS) == "Software Tools"

    def test_earliest_match_wins(self):
        raw = "Software Tools, though arguably System Software"
        assert parse_classification(raw, self.LABELS) == "Software Tools"

    def test_no_label_raises(self):
        with pytest.raises(NoLabelFound):
            parse_classification("no idea", self.LABELS)

    def test_case_insensitive(self):
        assert parse_classification("APPLICATION SOFTWARE", self.LABELS) \
            == "Application Software"
