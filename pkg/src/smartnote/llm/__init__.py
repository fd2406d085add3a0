from .budget import BudgetReport, budget_diff
from .providers import (
    CompletionParams,
    HttpProvider,
    MockProvider,
    merge_handler,
    parse_classification,
)
from .templates import (
    PromptTemplate,
    align_decimals,
    load_template,
    load_templates,
    render_prompt,
)

__all__ = [
    "BudgetReport",
    "budget_diff",
    "CompletionParams",
    "HttpProvider",
    "MockProvider",
    "merge_handler",
    "parse_classification",
    "PromptTemplate",
    "align_decimals",
    "load_template",
    "load_templates",
    "render_prompt",
]
